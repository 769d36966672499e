#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dualsu11 {

enum class Frequency { Signal, Idler };
enum class Polarization { H, V };

// One of the four physical modes: signal/idler crossed with H/V polarization.
// Loss ancillas live beyond these and are addressed by raw index internally.
struct ModeIndex {
    Frequency frequency;
    Polarization polarization;

    constexpr auto operator<=>(const ModeIndex&) const = default;
};

inline constexpr int kPhysicalModes = 4;

inline constexpr ModeIndex kSignalH{Frequency::Signal, Polarization::H};
inline constexpr ModeIndex kSignalV{Frequency::Signal, Polarization::V};
inline constexpr ModeIndex kIdlerH{Frequency::Idler, Polarization::H};
inline constexpr ModeIndex kIdlerV{Frequency::Idler, Polarization::V};

// Row layout used everywhere: sH=0, sV=1, iH=2, iV=3.
constexpr int flat_index(ModeIndex m) {
    return (m.frequency == Frequency::Idler ? 2 : 0) +
           (m.polarization == Polarization::V ? 1 : 0);
}

constexpr ModeIndex mode_from_flat(int i) {
    if (i < 0 || i >= kPhysicalModes)
        throw std::out_of_range("mode_from_flat: index outside the four physical modes");
    return ModeIndex{i < 2 ? Frequency::Signal : Frequency::Idler,
                     (i % 2) ? Polarization::V : Polarization::H};
}

constexpr std::string_view mode_name(ModeIndex m) {
    switch (flat_index(m)) {
        case 0: return "sH";
        case 1: return "sV";
        case 2: return "iH";
        default: return "iV";
    }
}

inline ModeIndex parse_mode(std::string_view name) {
    if (name == "sH") return kSignalH;
    if (name == "sV") return kSignalV;
    if (name == "iH") return kIdlerH;
    if (name == "iV") return kIdlerV;
    throw std::invalid_argument("unknown mode name \"" + std::string(name) +
                                "\" (expected one of sH, sV, iH, iV)");
}

}  // namespace dualsu11
