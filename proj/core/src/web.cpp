#include "plrn/web.hpp"

#include <cmath>

namespace plrn::verify {

namespace {

using geo::Point;

// 7-point degree-5 triangle rule (barycentric abscissae, weights sum to 1).
struct TriRule {
    double l1, l2, l3, w;
};
const TriRule kTri7[7] = {
    {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
    {0.05971587178976982, 0.47014206410511509, 0.47014206410511509, 0.13239415278850618},
    {0.47014206410511509, 0.05971587178976982, 0.47014206410511509, 0.13239415278850618},
    {0.47014206410511509, 0.47014206410511509, 0.05971587178976982, 0.13239415278850618},
    {0.79742698535308732, 0.10128650732345634, 0.10128650732345634, 0.12593918054482715},
    {0.10128650732345634, 0.79742698535308732, 0.10128650732345634, 0.12593918054482715},
    {0.10128650732345634, 0.10128650732345634, 0.79742698535308732, 0.12593918054482715},
};

} // namespace

double WebFunction::depth(Point x) const {
    const auto& v = domain.outer.vertices();
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    for (size_t i = 0; i < v.size(); ++i) {
        const double d = geo::point_segment_distance(x, v[i], v[(i + 1) % v.size()]);
        if (d < best) {
            second = best;
            best = d;
        } else if (d < second) {
            second = d;
        }
    }
    if (second - best < 1e-12) best += 1e-10; // nudge off the medial bisector
    return best;
}

double WebFunction::value_at(Point x) const {
    const double d = depth(x);
    const double gap = annulus.gap();
    if (d >= gap) return clip_value;
    return source.psi_at(annulus.r2 - d);
}

double WebFunction::grad_mag_at(Point x) const {
    const double d = depth(x);
    const double gap = annulus.gap();
    if (d >= gap) return 0.0;
    return std::abs(source.dpsi_at(annulus.r2 - d));
}

WebFunction build_web_with_annulus(const geo::DomainWithHoles& dom,
                                   const radial::ProblemParams& params, Mode mode,
                                   const geo::AnnulusSpec& annulus, int steps) {
    if (mode == Mode::Torsion && !(params.beta > 0.0))
        throw input_error("build_web: torsion mode requires beta > 0");
    radial::RadialProfile source = (mode == Mode::Eigen)
                                       ? radial::first_eigenvalue(params, annulus, steps)
                                       : radial::torsion(params, annulus, steps).profile;
    const double clip = source.psi.front(); // value at r1
    const double trace = source.psi.back();
    const double inr = geo::inradius(dom.outer);
    const double deep = std::min(inr, annulus.gap());
    const double deep_value = source.psi_at(annulus.r2 - deep);
    return WebFunction{dom,
                       annulus,
                       std::move(source),
                       params.beta > 0.0 ? Branch::PositiveBeta : Branch::NegativeBeta,
                       mode,
                       clip,
                       trace,
                       inr,
                       std::min(trace, deep_value),
                       std::max(trace, deep_value)};
}

WebFunction build_web(const geo::DomainWithHoles& dom, const radial::ProblemParams& params,
                      Mode mode, int steps) {
    const geo::AnnulusSpec annulus =
        geo::matched_annulus(dom.area(), dom.outer_perimeter(), params.n);
    return build_web_with_annulus(dom, params, mode, annulus, steps);
}

WebFunctionals evaluate_functionals(const WebFunction& web, const fem::Mesh& mesh) {
    if (std::abs(mesh.total_area() - web.domain.area()) >
        1e-6 * std::max(1.0, web.domain.area()))
        throw input_error("evaluate_functionals: mesh does not triangulate the web's domain");
    const double p = web.source.params.p;
    WebFunctionals f;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Point a = mesh.nodes[tr[0]];
        const Point b = mesh.nodes[tr[1]];
        const Point c = mesh.nodes[tr[2]];
        const double area = 0.5 * geo::cross(b - a, c - a);
        for (const TriRule& q : kTri7) {
            const Point x{q.l1 * a.x + q.l2 * b.x + q.l3 * c.x,
                          q.l1 * a.y + q.l2 * b.y + q.l3 * c.y};
            const double u = web.value_at(x);
            const double g = web.grad_mag_at(x);
            f.grad_energy += q.w * area * std::pow(g, p);
            f.p_mass += q.w * area * std::pow(std::abs(u), p);
            f.mass += q.w * area * u;
        }
    }
    f.boundary_term = web.source.params.beta * std::pow(std::abs(web.boundary_value), p) *
                      web.domain.outer_perimeter();
    const double num = f.grad_energy + f.boundary_term;
    f.j0 = num / f.p_mass;
    f.k0 = num / std::pow(std::abs(f.mass), p);
    return f;
}

} // namespace plrn::verify
