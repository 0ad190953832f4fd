#include "qndc/error.hpp"

namespace qndc {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::non_symmetric: return "non-symmetric matrix";
    case ErrorKind::not_psd: return "matrix not positive semidefinite";
    case ErrorKind::unknown_label: return "unknown component label";
    case ErrorKind::invalid_pulse: return "invalid pulse index";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::undefined_input: return "undefined input";
    case ErrorKind::uninformative_coupling: return "uninformative coupling";
    case ErrorKind::degenerate_estimator: return "degenerate estimator";
    case ErrorKind::inconsistent_data: return "inconsistent data";
    case ErrorKind::sampler_unsupported: return "sampler unsupported";
    case ErrorKind::too_few_shots: return "too few shots";
    case ErrorKind::parse_error: return "parse error";
    case ErrorKind::validation_error: return "validation error";
    case ErrorKind::io_error: return "i/o error";
    }
    return "unknown error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind)
{
}

} // namespace qndc
