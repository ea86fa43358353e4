#include "rankspectra/h_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "rankspectra/errors.hpp"
#include "rankspectra/quadrature.hpp"

namespace rankspectra {

namespace {

constexpr double kTailMass = 1e-12;

std::string lower(std::string_view s) {
    std::string out;
    for (char ch : s) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

double parse_number(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("H spec: bad number '" + std::string(s) + "'");
    }
    return v;
}

// Split on top-level commas.
std::vector<std::string_view> split_args(std::string_view s) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')') {
            --depth;
        } else if (s[i] == ',' && depth == 0) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(s.substr(start));
    return out;
}

HSpec make(HSpec::Kind kind, std::vector<double> params) {
    HSpec h;
    h.kind = kind;
    h.params = std::move(params);
    return h;
}

void validate(const HSpec& h) {
    const auto& p = h.params;
    switch (h.kind) {
        case HSpec::Kind::beta:
            if (p.size() != 2 || !(p[0] > 0.0) || !(p[1] > 0.0)) {
                throw ConfigError("H spec: beta(a,b) needs a,b > 0");
            }
            break;
        case HSpec::Kind::trunc_poisson:
            if (p.size() != 3 || !(p[0] > 0.0) || !(p[1] > 0.0) || !(p[2] >= p[1])) {
                throw ConfigError("H spec: trunc_poisson(rate,scale,cap) needs rate,scale > 0 and cap >= scale");
            }
            break;
        case HSpec::Kind::trunc_exp:
            if (p.size() != 2 || !(p[0] > 0.0) || !(p[1] > 0.0)) {
                throw ConfigError("H spec: trunc_exp(mean,cap) needs mean,cap > 0");
            }
            break;
        case HSpec::Kind::point:
            if (p.size() != 1 || !(p[0] >= 0.0)) {
                throw ConfigError("H spec: point(loc) needs loc >= 0");
            }
            break;
        case HSpec::Kind::mixture: {
            if (h.components.empty()) {
                throw ConfigError("H spec: empty mixture");
            }
            double total = 0.0;
            for (const auto& [w, _] : h.components) {
                if (!(w > 0.0)) {
                    throw ConfigError("H spec: mixture weights must be positive");
                }
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw ConfigError("H spec: mixture weights must sum to 1");
            }
            break;
        }
    }
}

HSpec parse_lowered(std::string_view s) {
    if (s == "h1") {
        return make(HSpec::Kind::beta, {3.0, 3.0});
    }
    if (s == "h2") {
        return make(HSpec::Kind::trunc_poisson, {24.0, 0.02, 1.0});
    }
    if (s == "h3") {
        return make(HSpec::Kind::trunc_exp, {0.63, 1.0});
    }
    if (s == "h4") {
        return make(HSpec::Kind::point, {1.0});
    }
    const auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')') {
        throw UnknownDistributionError("H spec: unknown law '" + std::string(s) + "'");
    }
    const auto name = s.substr(0, open);
    const auto body = s.substr(open + 1, s.size() - open - 2);
    const auto args = split_args(body);

    HSpec h;
    if (name == "mixture") {
        h.kind = HSpec::Kind::mixture;
        for (auto arg : args) {
            const auto star = arg.find('*');
            if (star == std::string_view::npos) {
                throw ConfigError("H spec: mixture component must be weight*spec");
            }
            h.components.emplace_back(parse_number(arg.substr(0, star)), parse_lowered(arg.substr(star + 1)));
        }
        validate(h);
        return h;
    }
    if (name == "beta") {
        h.kind = HSpec::Kind::beta;
    } else if (name == "trunc_poisson") {
        h.kind = HSpec::Kind::trunc_poisson;
    } else if (name == "trunc_exp") {
        h.kind = HSpec::Kind::trunc_exp;
    } else if (name == "point") {
        h.kind = HSpec::Kind::point;
    } else {
        throw UnknownDistributionError("H spec: unknown law '" + std::string(name) + "'");
    }
    for (auto arg : args) {
        h.params.push_back(parse_number(arg));
    }
    validate(h);
    return h;
}

std::vector<SpectralDistribution::Point> weighted_nodes(std::size_t order, double lo, double hi,
                                                        auto&& density) {
    const auto rule = gauss_legendre(order, lo, hi);
    std::vector<SpectralDistribution::Point> pts;
    pts.reserve(order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double w = rule.weights[i] * density(rule.nodes[i]);
        if (w > 0.0) {
            pts.push_back({rule.nodes[i], w});
        }
    }
    return pts;
}

void normalize(std::vector<SpectralDistribution::Point>& pts, double target) {
    double s = 0.0;
    for (const auto& pt : pts) {
        s += pt.weight;
    }
    for (auto& pt : pts) {
        pt.weight *= target / s;
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

HSpec parse_h_spec(std::string_view text) {
    const auto s = lower(text);
    if (s.empty()) {
        throw ConfigError("H spec: empty");
    }
    return parse_lowered(s);
}

SpectralDistribution HSpec::distribution(std::size_t order) const {
    validate(*this);
    using Point = SpectralDistribution::Point;
    switch (kind) {
        case Kind::beta: {
            const double a = params[0];
            const double b = params[1];
            const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
            auto nodes = weighted_nodes(order, 0.0, 1.0, [&](double t) {
                return std::exp(log_norm + (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
            });
            normalize(nodes, 1.0);
            return SpectralDistribution({}, std::move(nodes), 0.0, 1.0);
        }
        case Kind::trunc_poisson: {
            const double rate = params[0];
            const double scale = params[1];
            const double cap = params[2];
            std::vector<Point> atoms;
            double mass = 0.0;
            bool reached_cap = false;
            for (std::size_t k = 0;; ++k) {
                const double loc = static_cast<double>(k + 1) * scale;
                if (loc >= cap * (1.0 - 1e-12)) {
                    reached_cap = true;
                    break;
                }
                const double kd = static_cast<double>(k);
                const double pmf = std::exp(kd * std::log(rate) - rate - std::lgamma(kd + 1.0));
                if (pmf > 0.0) {
                    atoms.push_back({loc, pmf});
                    mass += pmf;
                }
                if (kd > rate && 1.0 - mass < kTailMass) {
                    break;
                }
            }
            const double rest = std::max(0.0, 1.0 - mass);
            if (reached_cap && rest > 0.0) {
                atoms.push_back({cap, rest});
            } else if (!atoms.empty()) {
                atoms.back().weight += rest;
            } else {
                atoms.push_back({cap, 1.0});
            }
            const double lo = atoms.front().location;
            const double hi = atoms.back().location;
            return SpectralDistribution(std::move(atoms), {}, lo, hi);
        }
        case Kind::trunc_exp: {
            const double mean = params[0];
            const double cap = params[1];
            const double tail = std::exp(-cap / mean);
            auto nodes = weighted_nodes(order, 0.0, cap, [&](double t) { return std::exp(-t / mean) / mean; });
            normalize(nodes, 1.0 - tail);
            return SpectralDistribution({{cap, tail}}, std::move(nodes), 0.0, cap);
        }
        case Kind::point:
            return SpectralDistribution::point_mass(params[0]);
        case Kind::mixture: {
            std::vector<std::pair<double, SpectralDistribution>> parts;
            for (const auto& [w, comp] : components) {
                parts.emplace_back(w, comp.distribution(order));
            }
            return SpectralDistribution::mixture(parts);
        }
    }
    throw ConfigError("H spec: unhandled kind");
}

double HSpec::sample(Rng& rng) const {
    switch (kind) {
        case Kind::beta: {
            std::gamma_distribution<double> ga(params[0], 1.0);
            std::gamma_distribution<double> gb(params[1], 1.0);
            const double x = ga(rng);
            const double y = gb(rng);
            return x / (x + y);
        }
        case Kind::trunc_poisson: {
            std::poisson_distribution<long long> pois(params[0]);
            return std::min(static_cast<double>(pois(rng) + 1) * params[1], params[2]);
        }
        case Kind::trunc_exp: {
            std::exponential_distribution<double> ex(1.0 / params[0]);
            return std::min(ex(rng), params[1]);
        }
        case Kind::point:
            return params[0];
        case Kind::mixture: {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double u = unif(rng);
            for (const auto& [w, comp] : components) {
                if (u < w) {
                    return comp.sample(rng);
                }
                u -= w;
            }
            return components.back().second.sample(rng);
        }
    }
    throw ConfigError("H spec: unhandled kind");
}

std::vector<double> HSpec::sample(Rng& rng, std::size_t count) const {
    std::vector<double> out(count);
    for (auto& v : out) {
        v = sample(rng);
    }
    return out;
}

std::string HSpec::to_string() const {
    std::string name;
    switch (kind) {
        case Kind::beta:
            name = "beta";
            break;
        case Kind::trunc_poisson:
            name = "trunc_poisson";
            break;
        case Kind::trunc_exp:
            name = "trunc_exp";
            break;
        case Kind::point:
            name = "point";
            break;
        case Kind::mixture: {
            std::string out = "mixture(";
            for (std::size_t i = 0; i < components.size(); ++i) {
                if (i > 0) {
                    out += ",";
                }
                out += fmt(components[i].first) + "*" + components[i].second.to_string();
            }
            return out + ")";
        }
    }
    std::string out = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += fmt(params[i]);
    }
    return out + ")";
}

}  // namespace rankspectra
