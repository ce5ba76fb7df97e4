#include "radar/diagnostics.hpp"

#include <iostream>

namespace radar {
namespace {

thread_local WarningSink current_sink;

} // namespace

void warn(const std::string& message) {
    if (current_sink) {
        current_sink(message);
        return;
    }
    std::cerr << "warning: " << message << '\n';
}

ScopedWarningSink::ScopedWarningSink(WarningSink sink) : previous_(std::move(current_sink)) {
    current_sink = std::move(sink);
}

ScopedWarningSink::~ScopedWarningSink() {
    current_sink = std::move(previous_);
}

WarningCapture::WarningCapture() : scope_([this](const std::string& m) { messages_.push_back(m); }) {}

bool WarningCapture::contains(const std::string& needle) const {
    for (const auto& m : messages_) {
        if (m.find(needle) != std::string::npos) return true;
    }
    return false;
}

} // namespace radar
