#pragma once

#include <vector>

#include "testscope/extract/extractor.hpp"

namespace testscope::bench {

/// `classes` production classes in `packages` packages, each with a test
/// case calling every method from its own command.
std::vector<SourceFile> synthetic_sources(std::size_t classes, std::size_t packages, std::size_t methods);

}  // namespace testscope::bench
