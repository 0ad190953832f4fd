#include "qndc/layout.hpp"

#include <array>
#include <string>

#include "qndc/error.hpp"

namespace qndc {

namespace {

constexpr std::array<std::string_view, 12> labels = {
    "J_x", "J_y", "J_z", "P_x", "P_y", "P_z",
    "Q_x", "Q_y", "Q_z", "R_x", "R_y", "R_z",
};

} // namespace

std::string_view label(Component c) noexcept
{
    return labels[static_cast<std::size_t>(zero_based(c))];
}

Component parse_component(std::string_view text)
{
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == text) {
            return static_cast<Component>(i + 1);
        }
    }
    throw Error(ErrorKind::unknown_label, "unknown component label '" + std::string(text) + "'");
}

Layout::Layout(int n_pulses) : n_pulses_(n_pulses)
{
    if (n_pulses < 1 || n_pulses > max_pulses) {
        throw Error(ErrorKind::invalid_pulse,
                    "layout supports 1 to 3 pulses, got " + std::to_string(n_pulses));
    }
}

int Layout::offset(Component c) const
{
    if (!contains(c)) {
        throw Error(ErrorKind::unknown_label, "component " + std::string(label(c)) + " not present in a "
                                                  + std::to_string(n_pulses_) + "-pulse layout");
    }
    return zero_based(c);
}

void Layout::require_pulse(int pulse) const
{
    if (!valid_pulse(pulse)) {
        throw Error(ErrorKind::invalid_pulse, "pulse " + std::to_string(pulse) + " outside 1.."
                                                  + std::to_string(n_pulses_));
    }
}

} // namespace qndc
