#include "radar/corpus.hpp"
#include "radar/error.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace radar {
namespace {

struct HunkHeader {
    std::size_t old_start = 0;
    std::size_t old_count = 1;
    std::size_t new_start = 0;
    std::size_t new_count = 1;
};

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

// "start[,count]"
bool parse_range(std::string_view text, std::size_t& start, std::size_t& count) {
    const auto comma = text.find(',');
    const auto first = text.substr(0, comma);
    auto [p, ec] = std::from_chars(first.data(), first.data() + first.size(), start);
    if (ec != std::errc{} || p != first.data() + first.size() || first.empty()) return false;
    count = 1;
    if (comma != std::string_view::npos) {
        const auto second = text.substr(comma + 1);
        auto [q, ec2] = std::from_chars(second.data(), second.data() + second.size(), count);
        if (ec2 != std::errc{} || q != second.data() + second.size() || second.empty()) return false;
    }
    return true;
}

// "@@ -a,b +c,d @@ optional section heading"
bool parse_hunk_header(std::string_view line, HunkHeader& out) {
    if (!starts_with(line, "@@ -")) return false;
    line.remove_prefix(4);
    const auto space = line.find(' ');
    if (space == std::string_view::npos) return false;
    if (!parse_range(line.substr(0, space), out.old_start, out.old_count)) return false;
    line.remove_prefix(space + 1);
    if (!starts_with(line, "+")) return false;
    line.remove_prefix(1);
    const auto end = line.find(' ');
    if (end == std::string_view::npos) return false;
    if (!parse_range(line.substr(0, end), out.new_start, out.new_count)) return false;
    return starts_with(line.substr(end + 1), "@@");
}

std::string header_path(std::string_view rest, std::string_view strip) {
    const auto tab = rest.find('\t');
    if (tab != std::string_view::npos) rest = rest.substr(0, tab);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r')) rest.remove_suffix(1);
    if (starts_with(rest, strip)) rest.remove_prefix(strip.size());
    return std::string(rest);
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

void truncate_context(Hunk& hunk, std::size_t limit) {
    auto& before = hunk.context_before;
    if (before.size() > limit) before.erase(before.begin(), before.end() - static_cast<std::ptrdiff_t>(limit));
    if (hunk.context_after.size() > limit) hunk.context_after.resize(limit);
}

// Splits the body of one "@@" block into change runs.
std::vector<Hunk> split_runs(const std::vector<std::pair<char, std::string_view>>& body, std::size_t limit) {
    std::vector<Hunk> runs;
    std::vector<std::string> pending_context;
    bool in_run = false;
    for (const auto& [tag, text] : body) {
        if (tag == ' ') {
            in_run = false;
            pending_context.emplace_back(text);
            continue;
        }
        if (!in_run) {
            Hunk h;
            h.context_before = std::move(pending_context);
            pending_context.clear();
            runs.push_back(std::move(h));
            in_run = true;
        }
        (tag == '+' ? runs.back().added : runs.back().removed).emplace_back(text);
    }
    if (!runs.empty()) runs.back().context_after = std::move(pending_context);
    for (auto& h : runs) truncate_context(h, limit);
    return runs;
}

} // namespace

std::vector<ChangedFile> parse_unified_diff(std::string_view text, std::size_t context_limit) {
    const auto lines = split_lines(text);
    std::vector<ChangedFile> files;
    std::map<std::string, std::size_t> index_of;
    ChangedFile* current = nullptr;

    std::size_t i = 0;
    while (i < lines.size()) {
        const auto line = lines[i];
        const std::size_t line_no = i + 1;

        if (starts_with(line, "--- ")) {
            if (i + 1 >= lines.size() || !starts_with(lines[i + 1], "+++ ")) {
                throw MalformedDiff(line_no, "'---' header not followed by '+++'");
            }
            auto old_path = header_path(line.substr(4), "a/");
            auto new_path = header_path(lines[i + 1].substr(4), "b/");
            auto path = (new_path == "/dev/null") ? old_path : new_path;
            if (path.empty() || path == "/dev/null") throw MalformedDiff(line_no, "file header without a path");
            auto [it, inserted] = index_of.try_emplace(path, files.size());
            if (inserted) files.push_back(ChangedFile{path, {}});
            current = &files[it->second];
            i += 2;
            continue;
        }

        if (starts_with(line, "@@")) {
            HunkHeader header;
            if (!parse_hunk_header(line, header)) throw MalformedDiff(line_no, "unparseable hunk header");
            if (current == nullptr) throw MalformedDiff(line_no, "hunk before any file header");
            std::size_t old_left = header.old_count;
            std::size_t new_left = header.new_count;
            std::vector<std::pair<char, std::string_view>> body;
            ++i;
            while (old_left > 0 || new_left > 0) {
                if (i >= lines.size()) {
                    throw MalformedDiff(i, "hunk body ends early (" + std::to_string(old_left) + " old, " +
                                               std::to_string(new_left) + " new lines missing)");
                }
                const auto body_line = lines[i];
                const char tag = body_line.empty() ? ' ' : body_line.front();
                const auto content = body_line.empty() ? body_line : body_line.substr(1);
                switch (tag) {
                case ' ':
                    if (old_left == 0 || new_left == 0) throw MalformedDiff(i + 1, "context line exceeds hunk counts");
                    --old_left;
                    --new_left;
                    break;
                case '-':
                    if (old_left == 0) throw MalformedDiff(i + 1, "more removed lines than the header declares");
                    --old_left;
                    break;
                case '+':
                    if (new_left == 0) throw MalformedDiff(i + 1, "more added lines than the header declares");
                    --new_left;
                    break;
                case '\\':
                    ++i;
                    continue;
                default:
                    throw MalformedDiff(i + 1, "unexpected line inside hunk body");
                }
                body.emplace_back(tag, content);
                ++i;
            }
            while (i < lines.size() && starts_with(lines[i], "\\")) ++i;
            auto runs = split_runs(body, context_limit);
            if (runs.empty()) throw MalformedDiff(line_no, "hunk contains no added or removed lines");
            for (auto& h : runs) current->hunks.push_back(std::move(h));
            continue;
        }

        // Anything between sections (diff --git, index, mode lines) is ignored.
        if (!line.empty() && (line.front() == '+' || line.front() == '-') && current != nullptr &&
            !starts_with(line, "+++") && !starts_with(line, "---")) {
            throw MalformedDiff(line_no, "change line outside of a hunk");
        }
        ++i;
    }

    // Sections without hunks (binary files, mode-only changes) carry no lines.
    std::erase_if(files, [](const ChangedFile& f) { return f.hunks.empty(); });
    return files;
}

} // namespace radar
