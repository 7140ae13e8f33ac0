#pragma once

#include <stdexcept>
#include <string>

namespace rtevo {

enum class Errc {
    duplicate_priority,
    non_positive_parameter,
    unknown_message,
    overflow,
    syntax_error,
    unknown_atom,
    missing_isum,
    infeasible_params,
    io_error,
    invalid_chromosome,
    invalid_config,
    horizon_too_large,
    oracle_failure,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::duplicate_priority: return "DuplicatePriority";
    case Errc::non_positive_parameter: return "NonPositiveParameter";
    case Errc::unknown_message: return "UnknownMessage";
    case Errc::overflow: return "Overflow";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::unknown_atom: return "UnknownAtom";
    case Errc::missing_isum: return "MissingIsum";
    case Errc::infeasible_params: return "InfeasibleParams";
    case Errc::io_error: return "IoError";
    case Errc::invalid_chromosome: return "InvalidChromosome";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::horizon_too_large: return "HorizonTooLarge";
    case Errc::oracle_failure: return "OracleFailure";
    }
    return "Error";
}

} // namespace rtevo
