#pragma once

#include <functional>
#include <string>
#include <vector>

namespace radar {

// Non-fatal conditions (pruned-empty vocabularies, skipped windows, fallback
// thresholds) are reported here instead of thrown. The default sink writes to
// stderr; tests install a capture.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);

/// Installs a sink for the current thread until destroyed.
class ScopedWarningSink {
public:
    explicit ScopedWarningSink(WarningSink sink);
    ~ScopedWarningSink();
    ScopedWarningSink(const ScopedWarningSink&) = delete;
    ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
    WarningSink previous_;
};

/// Collects warnings for inspection.
class WarningCapture {
public:
    WarningCapture();
    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(const std::string& needle) const;

private:
    std::vector<std::string> messages_;
    ScopedWarningSink scope_;
};

} // namespace radar
