#pragma once

#include <stdexcept>
#include <string>

namespace conecalc {

// Failure taxonomy. The CLI maps these onto process exit codes:
// invalid input -> 1, numerical/coverage failures -> 2,
// walls and indeterminate verdicts -> 3 (scriptable outcomes, not bugs).
enum class ErrorCode {
    InvalidDimension,
    InvalidLattice,
    InvalidMesh,
    InvalidSpectrum,
    InvalidRate,
    InvalidMode,
    InvalidInput,
    ExponentMismatch,
    InsufficientData,
    Coverage,
    NumericalFailure,
    Solvability,
    NotClosed,
    NotIntegrable,
    FredholmWall,
    Indeterminate,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

    // Exit status contract: 1 invalid input, 2 numerical failure, 3 wall/indeterminate.
    int exit_status() const {
        switch (code_) {
            case ErrorCode::Coverage:
            case ErrorCode::NumericalFailure:
            case ErrorCode::Solvability:
            case ErrorCode::NotClosed:
            case ErrorCode::NotIntegrable:
                return 2;
            case ErrorCode::FredholmWall:
            case ErrorCode::Indeterminate:
                return 3;
            default:
                return 1;
        }
    }

    const char* code_name() const {
        switch (code_) {
            case ErrorCode::InvalidDimension: return "invalid-dimension";
            case ErrorCode::InvalidLattice: return "invalid-lattice";
            case ErrorCode::InvalidMesh: return "invalid-mesh";
            case ErrorCode::InvalidSpectrum: return "invalid-spectrum";
            case ErrorCode::InvalidRate: return "invalid-rate";
            case ErrorCode::InvalidMode: return "invalid-mode";
            case ErrorCode::InvalidInput: return "invalid-input";
            case ErrorCode::ExponentMismatch: return "exponent-mismatch";
            case ErrorCode::InsufficientData: return "insufficient-data";
            case ErrorCode::Coverage: return "coverage";
            case ErrorCode::NumericalFailure: return "numerical-failure";
            case ErrorCode::Solvability: return "solvability";
            case ErrorCode::NotClosed: return "not-closed";
            case ErrorCode::NotIntegrable: return "not-integrable";
            case ErrorCode::FredholmWall: return "fredholm-wall";
            case ErrorCode::Indeterminate: return "indeterminate";
        }
        return "unknown";
    }

  private:
    ErrorCode code_;
};

}  // namespace conecalc
