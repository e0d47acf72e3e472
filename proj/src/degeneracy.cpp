#include "degstab/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "degstab/csv.hpp"
#include "degstab/errors.hpp"

namespace degstab {

const char* class_name(DegeneracyClass c) { return c == DegeneracyClass::WD ? "WD" : "SD"; }

CoefficientSpec CoefficientSpec::power_law(double alpha) {
    CoefficientSpec s;
    s.kind = Kind::PowerLaw;
    s.alpha = alpha;
    return s;
}

CoefficientSpec CoefficientSpec::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 5) fail(ErrorCode::InvalidArgument, "tabulated coefficient needs at least 5 samples");
    if (std::abs(samples.front().first) > 1e-14) fail(ErrorCode::InvalidArgument, "tabulated coefficient must start at x=0");
    if (std::abs(samples.back().first - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "tabulated coefficient must end at x=1");
    for (size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            fail(ErrorCode::InvalidArgument, "tabulated coefficient x values must be strictly ascending");
    CoefficientSpec s;
    s.kind = Kind::Tabulated;
    s.samples = std::move(samples);
    return s;
}

CoefficientSpec CoefficientSpec::closed_form(std::string name, std::function<double(double)> a,
                                             std::function<double(double)> da) {
    CoefficientSpec s;
    s.kind = Kind::ClosedForm;
    s.name = std::move(name);
    s.fn = std::move(a);
    s.dfn = std::move(da);
    return s;
}

CoefficientSpec CoefficientSpec::named(const std::string& name) {
    if (name == "x(2-x)")
        return closed_form(name, [](double x) { return x * (2.0 - x); }, [](double x) { return 2.0 - 2.0 * x; });
    if (name == "sin(pi x/2)") {
        constexpr double c = std::numbers::pi / 2.0;
        return closed_form(name, [](double x) { return std::sin(c * x); }, [](double x) { return c * std::cos(c * x); });
    }
    fail(ErrorCode::InvalidArgument, "unknown closed-form coefficient '" + name + "'");
}

CoefficientSpec CoefficientSpec::from_csv(const std::string& path) {
    CsvTable t = read_csv(path, 2);
    std::vector<std::pair<double, double>> samples;
    for (auto& r : t.rows) samples.emplace_back(r[0], r[1]);
    return tabulated(std::move(samples));
}

double CoefficientSpec::value(double x) const {
    switch (kind) {
        case Kind::PowerLaw:
            return x <= 0.0 ? (alpha > 0 ? 0.0 : 1.0) : std::pow(x, alpha);
        case Kind::ClosedForm:
            return fn(x);
        case Kind::Tabulated: {
            if (x <= samples.front().first) return samples.front().second;
            if (x >= samples.back().first) return samples.back().second;
            auto it = std::upper_bound(samples.begin(), samples.end(), x,
                                       [](double v, const auto& p) { return v < p.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            double w = (x - lo.first) / (hi.first - lo.first);
            return (1.0 - w) * lo.second + w * hi.second;
        }
    }
    return 0.0;
}

std::string CoefficientSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::PowerLaw: os << "x^" << alpha; break;
        case Kind::ClosedForm: os << name; break;
        case Kind::Tabulated: os << "tabulated(" << samples.size() << " samples)"; break;
    }
    return os.str();
}

double CoefficientProfile::a_max() const {
    double m = grid_values.maxCoeff();
    for (int i = 0; i <= 2000; ++i) m = std::max(m, spec.value(i / 2000.0));
    return m;
}

namespace {

// sup of x|a'|/a over the sample points of a tabulated coefficient, interior points only.
double tabulated_K(const std::vector<std::pair<double, double>>& s) {
    double K = 0.0;
    for (size_t j = 1; j + 1 < s.size(); ++j) {
        double da = (s[j + 1].second - s[j - 1].second) / (s[j + 1].first - s[j - 1].first);
        K = std::max(K, s[j].first * std::abs(da) / s[j].second);
    }
    return K;
}

double analytic_ratio(const CoefficientSpec& spec, double x) {
    if (spec.kind == CoefficientSpec::Kind::PowerLaw) {
        double a = std::pow(x, spec.alpha);
        double da = spec.alpha * std::pow(x, spec.alpha - 1.0);
        return x * std::abs(da) / a;
    }
    return x * std::abs(spec.dfn(x)) / spec.fn(x);
}

}  // namespace

CoefficientProfile classify(const CoefficientSpec& spec, const Grid& grid) {
    if (grid.n < 5) fail(ErrorCode::GridTooCoarse, "classification needs at least 3 interior points");
    if (spec.kind == CoefficientSpec::Kind::PowerLaw && !(spec.alpha > 0.0))
        fail(ErrorCode::NonDegenerate, "power-law exponent must be positive so that a(0)=0");

    const double a0 = spec.kind == CoefficientSpec::Kind::Tabulated ? spec.samples.front().second : spec.value(0.0);
    if (std::abs(a0) > kPositivityTol) fail(ErrorCode::NonDegenerate, "a(0) = " + format_number(a0) + " is not zero");

    CoefficientProfile p;
    p.spec = spec;
    p.grid_values.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) p.grid_values[i] = spec.value(grid.x[i]);
    p.grid_values[0] = 0.0;
    for (int i = 1; i < grid.n; ++i)
        if (!(p.grid_values[i] > kPositivityTol))
            fail(ErrorCode::NotPositive, "a(" + format_number(grid.x[i]) + ") = " + format_number(p.grid_values[i]));
    if (spec.kind == CoefficientSpec::Kind::Tabulated)
        for (size_t j = 1; j < spec.samples.size(); ++j)
            if (!(spec.samples[j].second > kPositivityTol))
                fail(ErrorCode::NotPositive, "tabulated a(" + format_number(spec.samples[j].first) + ") is not positive");

    double K = 0.0;
    if (spec.kind == CoefficientSpec::Kind::Tabulated) {
        K = tabulated_K(spec.samples);
    } else {
        for (int i = 1; i < grid.n - 1; ++i) K = std::max(K, analytic_ratio(spec, grid.x[i]));
        // The supremum over (0,1] is often a limit at x -> 0+; probe below the first node too.
        for (int k = 1; k <= 14; ++k) {
            double x = std::pow(10.0, -k);
            if (x < grid.x[1]) K = std::max(K, analytic_ratio(spec, x));
        }
    }
    if (!std::isfinite(K)) fail(ErrorCode::NotPositive, "degeneracy ratio is not finite");
    if (std::abs(K - 1.0) <= kClassSnap) K = 1.0;
    if (std::abs(K - 2.0) <= kClassSnap) K = 2.0;
    if (K >= 2.0) fail(ErrorCode::KOutOfRange, "K = " + format_number(K) + " >= 2 is not supported");
    if (!(K > 0.0)) fail(ErrorCode::KOutOfRange, "K = 0: coefficient is not degenerate of order (0,2)");
    p.K = K;
    p.cls = K < 1.0 ? DegeneracyClass::WD : DegeneracyClass::SD;
    return p;
}

}  // namespace degstab
