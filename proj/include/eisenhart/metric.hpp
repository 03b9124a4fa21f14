#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eisenhart/jet.hpp"
#include "eisenhart/tensor.hpp"

namespace eisenhart {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Metric components and their partial derivatives at one point.
///   g(i,j)          g_ij
///   dg(a,i,j)       d_a g_ij                 (order >= 1)
///   ddg(a,b,i,j)    d_a d_b g_ij             (order >= 2)
///   dddg(a,b,c,i,j) d_a d_b d_c g_ij         (order >= 3)
struct MetricJet {
    int order = 0;
    Tensor g;
    Tensor dg;
    Tensor ddg;
    Tensor dddg;

    static MetricJet zero(int dim, int order);
    int dim() const { return g.dim(); }
};

/// Scalar function value with gradient, Hessian and third derivatives.
struct ScalarJet {
    int order = 0;
    double value = 0.0;
    Tensor grad;
    Tensor hess;
    Tensor third;

    static ScalarJet zero(int dim, int order);
};

class ScalarField {
public:
    using Provider = std::function<ScalarJet(PointView, int)>;

    ScalarField(int dim, Provider provider, std::vector<bool> depends_on = {});

    /// f(point[axis]) with derivatives from a one-variable jet.
    static ScalarField along_axis(int dim, int axis, JetFunction f);
    static ScalarField constant(int dim, double c);

    int dim() const { return dim_; }
    double operator()(PointView p) const { return provider_(p, 0).value; }
    ScalarJet jet(PointView p, int order) const { return provider_(p, order); }
    const std::vector<bool>& depends_on() const { return depends_on_; }

private:
    int dim_;
    Provider provider_;
    std::vector<bool> depends_on_;
};

/// An n-dimensional metric given point-wise, together with its partial
/// derivatives up to third order and a predicate for admissible points.
class MetricChart {
public:
    using JetProvider = std::function<MetricJet(PointView, int)>;
    using Guard = std::function<bool(PointView)>;

    /// One non-zero component g_ij = g_ji (i <= j) as a function of a single coordinate.
    struct AxisComponent {
        int i;
        int j;
        JetFunction f;
    };

    /// `depends_on[a] == false` declares that no component depends on
    /// coordinate a (a cyclic coordinate). Empty means "depends on all".
    MetricChart(std::vector<std::string> labels, JetProvider jet, Guard guard = {},
                std::vector<bool> depends_on = {});

    /// Metric whose components depend on coordinate `axis` only, with exact derivatives.
    static MetricChart along_axis(std::vector<std::string> labels, int axis,
                                  std::vector<AxisComponent> components, Guard guard = {});

    /// Metric known only by its components; partials by nested central differences.
    static MetricChart from_components(std::vector<std::string> labels,
                                       std::function<Tensor(PointView)> components,
                                       Guard guard = {}, double step = 1e-3);

    /// Constant diagonal metric diag(signature).
    static MetricChart flat(const std::vector<int>& signature, std::vector<std::string> labels = {});

    int dim() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    int index_of(const std::string& label) const;
    const std::vector<bool>& depends_on() const { return depends_on_; }

    bool admissible(PointView p) const;

    /// Throws DomainError for inadmissible points, ArgumentError for a bad order.
    MetricJet jet(PointView p, int order) const;
    Tensor components(PointView p) const { return jet(p, 0).g; }

    /// Signs of the eigenvalues of g at p, ascending.
    std::vector<int> signature(PointView p) const;

    /// 1/2 g^ij p_i p_j at position q.
    double hamiltonian(PointView q, PointView momenta) const;

private:
    std::vector<std::string> labels_;
    JetProvider jet_;
    Guard guard_;
    std::vector<bool> depends_on_;
};

/// g^ij. Throws LinearAlgebraError when g is singular or numerically so.
Tensor invert_metric(const Tensor& g);

/// The metric factor * g with the jet assembled by the Leibniz rule.
MetricChart conformally_rescale(const MetricChart& metric, const ScalarField& factor);

}  // namespace eisenhart
