#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qndc {

enum class ErrorKind {
    dimension_mismatch,
    non_symmetric,
    not_psd,
    unknown_label,
    invalid_pulse,
    invalid_argument,
    undefined_input,
    uninformative_coupling,
    degenerate_estimator,
    inconsistent_data,
    sampler_unsupported,
    too_few_shots,
    parse_error,
    validation_error,
    io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so that drivers can
// map it onto exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace qndc
