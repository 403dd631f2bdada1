#include "hamcenter/trace.hpp"

#include <cmath>
#include <numbers>

#include "hamcenter/ode.hpp"

namespace hamcenter {

const char* to_string(OrbitOutcome o) {
    switch (o) {
        case OrbitOutcome::closed: return "closed";
        case OrbitOutcome::escaped: return "escaped";
        case OrbitOutcome::budget_exhausted: return "budget_exhausted";
        case OrbitOutcome::domain_error: return "domain_error";
    }
    return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= kTwoPi;
    while (a < -std::numbers::pi) a += kTwoPi;
    return a;
}

double image_angle(Vec2 f) { return std::atan2(f.y, f.x); }

bool inside_with_slack(const Box& b, Vec2 p) {
    const double slack =
        1e-9 * (1.0 + std::max({std::abs(b.xmin), std::abs(b.xmax), std::abs(b.ymin), std::abs(b.ymax)}));
    return p.x >= b.xmin - slack && p.x <= b.xmax + slack && p.y >= b.ymin - slack && p.y <= b.ymax + slack;
}

std::string escape_side(const Box& b, Vec2 p) {
    const double dx0 = b.xmin - p.x, dx1 = p.x - b.xmax, dy0 = b.ymin - p.y, dy1 = p.y - b.ymax;
    const double m = std::max({dx0, dx1, dy0, dy1});
    if (m == dx0) return "xmin";
    if (m == dx1) return "xmax";
    if (m == dy0) return "ymin";
    return "ymax";
}

/// Pulls z back onto {H_f = h} by Newton steps along the gradient.
FieldSample project_to_level(const PlanarMap& map, Vec2 z, double h) {
    FieldSample s = sample(map, z);
    for (int it = 0; it < 8; ++it) {
        const double r = s.hamiltonian - h;
        if (std::abs(r) <= 1e-15 * (1.0 + h)) break;
        const double g2 = norm2(s.gradient);
        if (g2 == 0.0) break;
        const Vec2 delta = (r / g2) * s.gradient;
        z -= delta;
        s = sample(map, z);
        if (norm(delta) <= 1e-16 * (1.0 + norm(z))) break;
    }
    return s;
}

}  // namespace

ReturnSection::ReturnSection(Vec2 start, Vec2 dir, Vec2 initial_velocity, double return_tol)
    : start_(start), dir_((1.0 / norm(dir)) * dir), return_tol_(return_tol) {
    const double c = cross(dir_, initial_velocity);
    sigma_ = c >= 0.0 ? 1.0 : -1.0;
}

ReturnSection ReturnSection::around_center(Vec2 center, Vec2 start, Vec2 initial_velocity) {
    const Vec2 d = start - center;
    return ReturnSection(start, d, initial_velocity, 1e-7 * (1.0 + norm(d)));
}

bool ReturnSection::crosses(Vec2 a, Vec2 b) const {
    const double sa = sigma_ * signed_distance(a);
    const double sb = sigma_ * signed_distance(b);
    return sa < 0.0 && sb >= 0.0;
}

OrbitTrace integrate_orbit(const PlanarMap& map, Vec2 start, std::optional<Vec2> center, const TraceOptions& opt) {
    const Box box = opt.box.value_or(map.domain().working_box());
    OrbitTrace tr;
    tr.start = start;
    if (!inside_with_slack(box, start)) throw PreconditionError("orbit start outside the working box");

    const FieldSample s0 = sample(map, start);
    if (norm(s0.f_value) == 0.0) throw PreconditionError("orbit start is a zero of f");
    const double h = s0.hamiltonian;
    tr.h = h;
    tr.orientation = s0.det >= 0.0 ? 1.0 : -1.0;

    const Vec2 v0 = s0.field;
    const ReturnSection section =
        center ? ReturnSection::around_center(*center, start, v0)
               : ReturnSection(start, Vec2{-v0.y, v0.x}, v0, 1e-7 * (1.0 + norm(start)));

    auto field = [&](Vec2 z) { return sample(map, z).field; };

    Vec2 z = start;
    Vec2 k1 = v0;
    Vec2 fz = s0.f_value;
    double t = 0.0;
    const double theta0 = image_angle(s0.f_value);
    double theta = theta0;
    tr.points.push_back({z, t, theta});

    const double speed = std::max(norm(v0), 1e-300);
    const double rate = std::max(std::abs(s0.det), 1e-300);
    double dt = std::min(0.5 * opt.max_dtheta / rate, 0.01 * (1.0 + norm(z)) / speed);
    const double theta_budget = opt.max_winding * kTwoPi;

    // Advances from (z, k1) by tau without error control and projects.
    auto advance = [&](double tau) {
        const Dp5Step st = dp5_step(field, z, k1, tau);
        return project_to_level(map, st.z, h);
    };

    long steps = 0;
    while (true) {
        if (steps++ >= opt.max_steps) {
            tr.outcome = OrbitOutcome::budget_exhausted;
            break;
        }
        if (dt < opt.min_step) {
            tr.outcome = OrbitOutcome::budget_exhausted;
            tr.stiff = true;
            break;
        }
        Dp5Step st;
        FieldSample sn;
        try {
            st = dp5_step(field, z, k1, dt);
            const double err = dp5_error_norm(st, z, opt.rtol, opt.atol);
            if (!(err <= 1.0)) {
                dt *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
                ++tr.rejected_steps;
                continue;
            }
            sn = project_to_level(map, st.z, h);
            const double dtheta = wrap_angle(image_angle(sn.f_value) - image_angle(fz));
            if (std::abs(dtheta) > opt.max_dtheta) {
                dt *= 0.9 * opt.max_dtheta / std::abs(dtheta);
                ++tr.rejected_steps;
                continue;
            }
            ++tr.accepted_steps;
            const double theta_n = theta + dtheta;
            const Vec2 zn = sn.point;

            if (!inside_with_slack(box, zn)) {
                tr.outcome = OrbitOutcome::escaped;
                tr.escape_side = escape_side(box, zn);
                tr.escape_time = t + dt;
                tr.total_dtheta = theta - theta0;
                return tr;
            }

            if (section.crosses(z, zn)) {
                // Regula falsi (Illinois) on the section distance over the step.
                double lo = 0.0, hi = dt;
                double glo = section.signed_distance(z), ghi = section.signed_distance(zn);
                FieldSample cross_s = sn;
                double tau = dt;
                int side = 0;
                for (int it = 0; it < 80; ++it) {
                    tau = (ghi == glo) ? 0.5 * (lo + hi) : lo - glo * (hi - lo) / (ghi - glo);
                    if (!(tau > lo && tau < hi)) tau = 0.5 * (lo + hi);
                    cross_s = advance(tau);
                    const double g = section.signed_distance(cross_s.point);
                    if (g == 0.0 || hi - lo <= 1e-15 * (t + dt)) break;
                    if ((g < 0.0) == (glo < 0.0)) {
                        lo = tau;
                        glo = g;
                        if (side == -1) ghi *= 0.5;
                        side = -1;
                    } else {
                        hi = tau;
                        ghi = g;
                        if (side == 1) glo *= 0.5;
                        side = 1;
                    }
                    if (std::abs(g) <= 1e-15 * (1.0 + norm(cross_s.point))) break;
                }
                if (section.near_start(cross_s.point)) {
                    const double theta_c = theta + wrap_angle(image_angle(cross_s.f_value) - image_angle(fz));
                    tr.points.push_back({cross_s.point, t + tau, theta_c});
                    tr.outcome = OrbitOutcome::closed;
                    tr.period = t + tau;
                    tr.total_dtheta = theta_c - theta0;
                    tr.winding = static_cast<int>(std::lround(std::abs(tr.total_dtheta) / kTwoPi));
                    return tr;
                }
            }

            tr.points.push_back({zn, t + dt, theta_n});
            z = zn;
            k1 = sn.field;
            fz = sn.f_value;
            t += dt;
            theta = theta_n;
            if (std::abs(theta - theta0) > theta_budget) {
                tr.outcome = OrbitOutcome::budget_exhausted;
                break;
            }
            dt *= err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        } catch (const DomainError&) {
            dt *= 0.25;
            ++tr.rejected_steps;
            if (dt < opt.min_step) {
                tr.outcome = OrbitOutcome::domain_error;
                tr.error_point = z;
                break;
            }
        } catch (const OverflowError&) {
            dt *= 0.25;
            ++tr.rejected_steps;
            if (dt < opt.min_step) {
                tr.outcome = OrbitOutcome::domain_error;
                tr.error_point = z;
                break;
            }
        }
    }
    tr.total_dtheta = theta - theta0;
    return tr;
}

Vec2 fan_direction(int k) {
    const double a = kTwoPi * (k % 8) / 8.0;
    return {std::cos(a), std::sin(a)};
}

std::optional<Vec2> level_point_on_ray(const PlanarMap& map, Vec2 center, Vec2 dir, double h, const Box& box) {
    dir = (1.0 / norm(dir)) * dir;
    double s_prev = 0.0;
    double s = 1e-9 * (1.0 + norm(center));
    try {
        for (int it = 0; it < 2000; ++it) {
            const Vec2 p = center + s * dir;
            if (!box.contains(p)) return std::nullopt;
            if (map.hamiltonian(p) >= h) {
                double lo = s_prev, hi = s;
                for (int b = 0; b < 200 && hi - lo > 4e-16 * hi; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if (map.hamiltonian(center + mid * dir) >= h) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                // Of the two bracket ends, keep the one whose level is closer to h.
                const Vec2 a = center + lo * dir, c = center + hi * dir;
                return std::abs(map.hamiltonian(a) - h) < std::abs(map.hamiltonian(c) - h) && lo > 0.0 ? a : c;
            }
            s_prev = s;
            s *= 1.1;
        }
    } catch (const DomainError&) {
    } catch (const OverflowError&) {
    }
    return std::nullopt;
}

TraceInvariantReport check_trace_invariants(const PlanarMap& map, const OrbitTrace& trace) {
    TraceInvariantReport r;
    const double h = trace.h;
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const Vec2 f = map.value(trace.points[i].p);
        const double hh = 0.5 * norm2(f);
        r.max_energy_dev = std::max(r.max_energy_dev, std::abs(hh - h) / (1.0 + h));
        r.max_circle_dev = std::max(r.max_circle_dev, std::abs(norm2(f) - 2.0 * h) / (1.0 + h));
        if (i > 0 && trace.orientation * (trace.points[i].theta - trace.points[i - 1].theta) <= 0.0) {
            r.theta_monotone = false;
        }
    }
    return r;
}

WindingCertificate winding_certificate(const PlanarMap& map, const CenterRecord& center, double h,
                                       const TraceOptions& opt, int first_ray, OrbitTrace* trace_out) {
    if (!(h > 0.0)) throw std::invalid_argument("winding_certificate: level must be positive");
    WindingCertificate cert;
    cert.h = h;
    const Box box = opt.box.value_or(map.domain().working_box());
    std::optional<Vec2> start;
    for (int k = 0; k < 8 && !start; ++k) {
        start = level_point_on_ray(map, center.location, fan_direction(first_ray + k), h, box);
    }
    if (!start) {
        cert.level_unreachable = true;
        cert.outcome = OrbitOutcome::escaped;
        return cert;
    }
    cert.start = *start;
    OrbitTrace tr = integrate_orbit(map, *start, center.location, opt);
    cert.outcome = tr.outcome;
    cert.stiff = tr.stiff;
    cert.closed = tr.outcome == OrbitOutcome::closed;
    if (cert.closed) {
        cert.winding = tr.winding;
        cert.period = tr.period;
    }
    const TraceInvariantReport inv = check_trace_invariants(map, tr);
    cert.invariants_held = inv.max_energy_dev <= 1e-8 && inv.max_circle_dev <= 2e-8 && inv.theta_monotone;
    cert.injective_on_orbit = cert.closed && cert.winding == 1 && cert.invariants_held;
    if (trace_out) *trace_out = std::move(tr);
    return cert;
}

double angular_speed_check(const PlanarMap& map, const OrbitTrace& trace, bool relative) {
    if (trace.points.size() < 10) throw PreconditionError("angular_speed_check needs at least 10 samples");
    auto field = [&](Vec2 z) { return sample(map, z).field; };
    double worst = 0.0;
    for (const auto& op : trace.points) {
        const FieldSample s = sample(map, op.p);
        const double rate = std::abs(s.det);
        double delta = 1e-3 / std::max(rate, 1e-300);
        delta = std::min(delta, 1e-3 * (1.0 + norm(op.p)) / std::max(norm(s.field), 1e-300));
        const Vec2 zp = dp5_step(field, op.p, s.field, delta).z;
        const Vec2 zm = dp5_step(field, op.p, s.field, -delta).z;
        const double a0 = image_angle(s.f_value);
        const double ap = a0 + wrap_angle(image_angle(map.value(zp)) - a0);
        const double am = a0 + wrap_angle(image_angle(map.value(zm)) - a0);
        const double rate_fd = (ap - am) / (2.0 * delta);
        double dev = std::abs(rate_fd - s.det);
        if (relative) dev /= std::max(rate, 1e-300);
        worst = std::max(worst, dev);
    }
    return worst;
}

}  // namespace hamcenter
