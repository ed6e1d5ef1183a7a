#pragma once

#include <cstdint>
#include <vector>

namespace asdim {

using Index = std::int32_t;
using IndexList = std::vector<Index>;

}  // namespace asdim
