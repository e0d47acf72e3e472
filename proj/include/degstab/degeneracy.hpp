#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "degstab/grid.hpp"

namespace degstab {

enum class DegeneracyClass { WD, SD };

const char* class_name(DegeneracyClass c);

/// Degenerate coefficient a(x) on [0,1] with a(0) = 0.
struct CoefficientSpec {
    enum class Kind { PowerLaw, Tabulated, ClosedForm };

    Kind kind = Kind::PowerLaw;
    double alpha = 1.0;                                // PowerLaw
    std::vector<std::pair<double, double>> samples;    // Tabulated, x ascending from 0
    std::string name;                                  // ClosedForm
    std::function<double(double)> fn, dfn;             // ClosedForm a and a'

    static CoefficientSpec power_law(double alpha);
    static CoefficientSpec tabulated(std::vector<std::pair<double, double>> samples);
    static CoefficientSpec closed_form(std::string name, std::function<double(double)> a,
                                       std::function<double(double)> da);
    /// Catalog of closed forms: "x(2-x)", "sin(pi x/2)".
    static CoefficientSpec named(const std::string& name);
    static CoefficientSpec from_csv(const std::string& path);

    /// a(x); tabulated data is interpolated linearly.
    double value(double x) const;
    std::string describe() const;
};

struct CoefficientProfile {
    CoefficientSpec spec;
    Eigen::VectorXd grid_values;
    double K = 0.0;
    DegeneracyClass cls = DegeneracyClass::WD;

    double a(double x) const { return spec.value(x); }
    double a_max() const;
};

/// Values of K within this distance of a class boundary are snapped onto it.
inline constexpr double kClassSnap = 1e-9;
inline constexpr double kPositivityTol = 1e-12;

CoefficientProfile classify(const CoefficientSpec& spec, const Grid& grid);

}  // namespace degstab
