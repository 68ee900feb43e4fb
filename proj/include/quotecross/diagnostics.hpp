#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace quotecross {

// One skipped row or recoverable problem: where it happened and why.
struct Diagnostic {
    std::string file;
    std::size_t line = 0;  // 0 when not tied to a line
    std::string reason;

    std::string to_string() const {
        if (line == 0) return file + ": " + reason;
        return file + ":" + std::to_string(line) + ": " + reason;
    }
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace quotecross
