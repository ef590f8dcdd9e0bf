#include "conecalc/decay.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "conecalc/error.hpp"

namespace conecalc {

void DecaySeries::validate() const {
    if (samples.size() < 8)
        throw Error(ErrorCode::InsufficientData, "need at least 8 decay samples");
    double prev_r = 1.0;
    for (const auto& [r, y] : samples) {
        if (!(r > 0.0 && r < 1.0))
            throw Error(ErrorCode::InvalidInput, "radii must lie in (0,1)");
        if (!(y > 0.0))
            throw Error(ErrorCode::InvalidInput, "decay values must be positive");
        if (!(r < prev_r))
            throw Error(ErrorCode::InvalidInput, "radii must decrease strictly toward 0");
        prev_r = r;
    }
    double decades = std::log10(samples.front().first / samples.back().first);
    if (decades < 3.0 - 1e-12) {
        std::ostringstream os;
        os << "samples span only " << decades << " decades; at least 3 are needed";
        throw Error(ErrorCode::InsufficientData, os.str());
    }
}

const char* to_string(DecayModel m) {
    return m == DecayModel::Power ? "power" : "logpower";
}

const char* to_string(DecayVerdict v) {
    switch (v) {
        case DecayVerdict::ConicalCandidate: return "conical-candidate";
        case DecayVerdict::Conical: return "conical";
        case DecayVerdict::NotConicalLog: return "not-conical-log-decay";
        case DecayVerdict::NotLittleOhR: return "not-o(r)";
        case DecayVerdict::OutsideRateWindow: return "outside-rate-window";
    }
    return "unknown";
}

namespace {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

// Weighted least squares z ~ intercept + slope * x.
LinearFit weighted_line(const std::vector<double>& x, const std::vector<double>& z,
                        const std::vector<double>& w) {
    double sw = 0.0, sx = 0.0, sz = 0.0, sxx = 0.0, sxz = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sz += w[i] * z[i];
        sxx += w[i] * x[i] * x[i];
        sxz += w[i] * x[i] * z[i];
    }
    double det = sw * sxx - sx * sx;
    if (std::fabs(det) < 1e-30)
        throw Error(ErrorCode::InsufficientData, "degenerate abscissa for the linear fit");
    LinearFit fit;
    fit.slope = (sw * sxz - sx * sz) / det;
    fit.intercept = (sxx * sz - sx * sxz) / det;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double resid = z[i] - fit.intercept - fit.slope * x[i];
        ss += w[i] * resid * resid;
    }
    fit.rms = std::sqrt(ss / sw);
    return fit;
}

// Cell widths in log r: uniform-in-log weighting for arbitrary spacing.
std::vector<double> log_r_weights(const DecaySeries& s) {
    const std::size_t n = s.samples.size();
    std::vector<double> t(n), w(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::log(s.samples[i].first);
    for (std::size_t i = 0; i < n; ++i) {
        double left = (i == 0) ? t[0] : 0.5 * (t[i - 1] + t[i]);
        double right = (i + 1 == n) ? t[n - 1] : 0.5 * (t[i] + t[i + 1]);
        w[i] = std::fabs(left - right);
        if (w[i] <= 0.0) w[i] = 1e-12;
    }
    return w;
}

}  // namespace

DecayFit fit_decay(const DecaySeries& series, DecayModel model) {
    series.validate();
    const std::size_t n = series.samples.size();
    std::vector<double> x(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = series.samples[i].first;
        double y = series.samples[i].second;
        if (model == DecayModel::Power) {
            x[i] = std::log(r);
            z[i] = std::log(y);
        } else {
            x[i] = std::log(std::fabs(std::log(r)));
            z[i] = std::log(y) - std::log(r);
        }
    }
    LinearFit lf = weighted_line(x, z, log_r_weights(series));
    DecayFit fit;
    fit.model = model;
    fit.residual = lf.rms;
    fit.parameter = (model == DecayModel::Power) ? lf.slope + 1.0 : -lf.slope;
    return fit;
}

DecayClassification classify_decay(const DecaySeries& series, const ExceptionalSet* D,
                                   double margin_threshold) {
    DecayClassification out;
    out.power = fit_decay(series, DecayModel::Power);
    out.logpower = fit_decay(series, DecayModel::LogPower);

    const double eps = 1e-14;
    bool power_wins = out.power.residual <= out.logpower.residual;
    const DecayFit& win = power_wins ? out.power : out.logpower;
    const DecayFit& lose = power_wins ? out.logpower : out.power;
    out.model = win.model;
    out.parameter = win.parameter;
    out.margin = (lose.residual + eps) / (win.residual + eps);

    if (out.margin < margin_threshold) {
        std::ostringstream os;
        os << "model residuals too close to call (margin " << out.margin
           << " < " << margin_threshold << "): power mu=" << out.power.parameter
           << " rms=" << out.power.residual << ", logpower alpha=" << out.logpower.parameter
           << " rms=" << out.logpower.residual;
        throw Error(ErrorCode::Indeterminate, os.str());
    }

    if (!power_wins) {
        out.verdict = DecayVerdict::NotConicalLog;
    } else if (out.parameter <= 2.0) {
        out.verdict = DecayVerdict::NotLittleOhR;
    } else if (out.parameter >= 3.0) {
        out.verdict = DecayVerdict::OutsideRateWindow;
    } else if (D != nullptr) {
        out.verdict = rate_admissible(*D, out.parameter) ? DecayVerdict::Conical
                                                         : DecayVerdict::OutsideRateWindow;
    } else {
        out.verdict = DecayVerdict::ConicalCandidate;
    }
    return out;
}

DecaySeries read_decay_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open CSV file: " + path);
    DecaySeries series;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        double r, y;
        if (!(ls >> r >> y)) continue;  // tolerate a header row
        series.samples.emplace_back(r, y);
    }
    series.validate();
    return series;
}

}  // namespace conecalc
