#pragma once

#include <functional>
#include <string>

namespace bundler {

// Validity-regime warnings. The default sink writes to stderr; an empty
// function silences them.
using WarningSink = std::function<void(const std::string&)>;

WarningSink set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace bundler
