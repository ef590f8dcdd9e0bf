#pragma once

#include <string>
#include <vector>

#include "conecalc/indicial.hpp"

namespace conecalc {

// Classify sampled approach-to-cone data |phi - iota|(r) near r -> 0 as a
// conical power law O(r^{mu-1}) versus slow log decay O(r |log r|^{-alpha}),
// and estimate the exponent. Both models are linear after a coordinate
// transform, so the fits are weighted linear least squares.

struct DecaySeries {
    // (r, y) with r in (0,1) strictly decreasing toward 0 and y > 0;
    // at least 8 samples spanning >= 3 decades in r.
    std::vector<std::pair<double, double>> samples;

    void validate() const;
};

enum class DecayModel { Power, LogPower };

const char* to_string(DecayModel m);

struct DecayFit {
    DecayModel model = DecayModel::Power;
    double parameter = 0.0;  // mu for power, alpha for logpower
    double residual = 0.0;   // weighted RMS residual in transformed coordinates
};

// power:    log y ~ c + (mu-1) log r
// logpower: log y - log r ~ c - alpha log |log r|
// Samples are weighted uniformly in log r so inner decades are not drowned.
DecayFit fit_decay(const DecaySeries& series, DecayModel model);

enum class DecayVerdict {
    ConicalCandidate,   // power model, mu in (2,3); admissibility left to the caller
    Conical,            // power model, mu in (2,3), passes rate admissibility
    NotConicalLog,      // logpower wins: not a conical singularity
    NotLittleOhR,       // power with mu <= 2: violates |phi - iota| = o(r)
    OutsideRateWindow,  // power with mu >= 3
};

const char* to_string(DecayVerdict v);

struct DecayClassification {
    DecayModel model = DecayModel::Power;
    double parameter = 0.0;
    double margin = 0.0;  // losing residual / winning residual
    DecayVerdict verdict = DecayVerdict::ConicalCandidate;
    DecayFit power;
    DecayFit logpower;
};

// Fits both models and keeps the lower-residual one. margin below the
// threshold raises an indeterminate error rather than guessing. When an
// exceptional set is supplied, a power fit with mu in (2,3) is additionally
// screened through rate admissibility to upgrade the verdict.
DecayClassification classify_decay(const DecaySeries& series,
                                   const ExceptionalSet* D = nullptr,
                                   double margin_threshold = 1.2);

// CSV rows "r,y" (one per line, optional header).
DecaySeries read_decay_csv(const std::string& path);

}  // namespace conecalc
