#pragma once

#include <string_view>

namespace qndc {

// Phase-space components in their fixed order. The numeric value is the
// 1-based index used throughout the QND literature, e.g. J_z = 3, P_y = 5.
enum class Component : int {
    J_x = 1, J_y, J_z,
    P_x, P_y, P_z,
    Q_x, Q_y, Q_z,
    R_x, R_y, R_z,
};

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr int max_pulses = 3;

[[nodiscard]] constexpr int one_based(Component c) noexcept { return static_cast<int>(c); }
[[nodiscard]] constexpr int zero_based(Component c) noexcept { return static_cast<int>(c) - 1; }

/// Block 0 holds the atoms, block k >= 1 holds pulse k.
[[nodiscard]] constexpr int block_of(Component c) noexcept { return zero_based(c) / 3; }

[[nodiscard]] constexpr Component component_at(int block, Axis axis) noexcept
{
    return static_cast<Component>(3 * block + static_cast<int>(axis) + 1);
}

/// The measured meter channel S_y of pulse k (P_y, Q_y or R_y).
[[nodiscard]] constexpr Component meter_of(int pulse) noexcept
{
    return component_at(pulse, Axis::y);
}

std::string_view label(Component c) noexcept;

/// Parses "J_z", "P_y", ... Throws Error(unknown_label).
Component parse_component(std::string_view text);

class Layout {
public:
    /// Throws Error(invalid_pulse) unless 1 <= n_pulses <= 3.
    explicit Layout(int n_pulses);

    [[nodiscard]] int n_pulses() const noexcept { return n_pulses_; }
    [[nodiscard]] int dimension() const noexcept { return 3 * (1 + n_pulses_); }
    [[nodiscard]] bool contains(Component c) const noexcept { return block_of(c) <= n_pulses_; }
    [[nodiscard]] bool valid_pulse(int pulse) const noexcept { return pulse >= 1 && pulse <= n_pulses_; }

    /// Zero-based storage offset of a component; throws Error(unknown_label)
    /// if the component is not part of this layout.
    [[nodiscard]] int offset(Component c) const;

    /// Throws Error(invalid_pulse).
    void require_pulse(int pulse) const;

    friend bool operator==(const Layout&, const Layout&) = default;

private:
    int n_pulses_;
};

} // namespace qndc
