#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcnet/util.hpp"

namespace dcnet {

/// One observation: a feature vector and its scalar target value.
struct Sample {
    std::vector<double> features;
    double target = 0.0;
};

/// Immutable after construction; sample order is significant (index i is the
/// index used everywhere downstream).
struct Dataset {
    std::vector<Sample> samples;
    int d = 0;
    std::string name;

    std::size_t size() const { return samples.size(); }

    const std::vector<double>& features(std::size_t i) const { return samples[i].features; }
    double target(std::size_t i) const { return samples[i].target; }

    /// Appends a constant-1 feature to every sample (opt-in bias column).
    Dataset with_bias_column() const {
        Dataset out = *this;
        for (auto& s : out.samples) s.features.push_back(1.0);
        out.d = d + 1;
        out.name = name + "+bias";
        return out;
    }
};

struct GridSpec {
    int points_per_axis = 50;
    double lo = -1.0;
    double hi = 1.0;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Loads a delimited numeric file, one sample per line. When `label_first`
/// the first column is the target (UCR archive convention), otherwise the
/// last column is. Requires a constant field count >= 2 across all lines.
inline Dataset load_delimited(const std::string& path, char delimiter, bool label_first) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    Dataset ds;
    ds.name = path;
    std::string line;
    std::size_t lineno = 0;
    std::size_t expected_fields = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == EOF) break;  // trailing newline

        std::vector<double> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t end = line.find(delimiter, start);
            std::string_view token(line.data() + start,
                                   (end == std::string::npos ? line.size() : end) - start);
            double v;
            if (!parse_double(token, v) || !std::isfinite(v))
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": field " + std::to_string(fields.size() + 1) +
                                 " is not a finite number: '" + std::string(token) + "'");
            fields.push_back(v);
            if (end == std::string::npos) break;
            start = end + 1;
        }
        if (fields.size() < 2)
            throw ParseError(path + ":" + std::to_string(lineno) + ": need at least 2 fields");
        if (expected_fields == 0) {
            expected_fields = fields.size();
        } else if (fields.size() != expected_fields) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(expected_fields) + " fields, found " +
                             std::to_string(fields.size()));
        }

        Sample s;
        if (label_first) {
            s.target = fields.front();
            s.features.assign(fields.begin() + 1, fields.end());
        } else {
            s.target = fields.back();
            s.features.assign(fields.begin(), fields.end() - 1);
        }
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) throw ParseError(path + ": empty file");
    ds.d = static_cast<int>(ds.samples.front().features.size());
    return ds;
}

/// Function with one deep minimum at (0.5, 0).
inline double phi1(double x, double y) { return std::sqrt(std::fabs(x - 0.5) + 3.0 * std::fabs(y)); }

/// Function with several shallow local minima; range [-2, 1].
inline double phi2(double x, double y) {
    return std::sin(5.0 * x - 0.5) - std::sqrt(std::fabs(std::cos(7.0 * y)));
}

/// Uniform inclusive grid on [lo,hi]^2, enumerated row-major (x outer, y
/// inner), targets fn(x, y).
inline Dataset make_grid(const GridSpec& spec, const std::function<double(double, double)>& fn) {
    if (spec.points_per_axis < 2) throw std::invalid_argument("make_grid: points_per_axis >= 2");
    if (!(spec.lo < spec.hi)) throw std::invalid_argument("make_grid: lo < hi required");
    const int k = spec.points_per_axis;
    const double step = (spec.hi - spec.lo) / (k - 1);
    Dataset ds;
    ds.d = 2;
    ds.samples.reserve(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i) {
        const double x = (i == k - 1) ? spec.hi : spec.lo + step * i;
        for (int j = 0; j < k; ++j) {
            const double y = (j == k - 1) ? spec.hi : spec.lo + step * j;
            ds.samples.push_back(Sample{{x, y}, fn(x, y)});
        }
    }
    std::ostringstream label;
    label << "grid" << k << "x" << k;
    ds.name = label.str();
    return ds;
}

}  // namespace dcnet
