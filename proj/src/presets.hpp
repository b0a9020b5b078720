#pragma once

#include <array>
#include <string_view>

namespace cellcap::sweep::detail {

struct EmbeddedPreset {
    std::string_view name;
    std::string_view text;
};

extern const std::array<EmbeddedPreset, 4> embedded_presets;

} // namespace cellcap::sweep::detail
