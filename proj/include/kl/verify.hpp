#pragma once

#include "kl/derivative.hpp"
#include "kl/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kl {

/// Pointwise re-evaluation of derivative stages with the definition-level
/// oracles. Bounded-only verdicts are counted separately and never gate.
struct TraceCheck {
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    std::size_t bounded_only = 0;
    std::optional<std::string> first_mismatch;

    bool ok() const { return mismatches == 0; }

    void merge(const TraceCheck& o)
    {
        checked += o.checked;
        mismatches += o.mismatches;
        bounded_only += o.bounded_only;
        if (!first_mismatch) first_mismatch = o.first_mismatch;
    }
};

namespace detail {

/// `stage(F)` returns the pointwise oracle for one stage.
template <class Stage>
TraceCheck check_stages(const std::vector<RepSet>& trace, const ProbeSet& probes, Stage stage)
{
    TraceCheck c;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const RepSet& F = trace[i];
        auto oracle = stage(F);
        for (const auto& x : probes.points()) {
            if (!F.contains(x)) continue;
            const OracleVerdict v = oracle(x);
            const bool symbolic = trace[i + 1].contains(x);
            if (v.confidence == Confidence::bounded_only) {
                ++c.bounded_only;
                continue;
            }
            ++c.checked;
            if (v.value != symbolic) {
                ++c.mismatches;
                if (!c.first_mismatch)
                    c.first_mismatch = "stage " + std::to_string(i + 1) + " at " + x.str() + " in F=" + F.str() + ": symbolic " +
                                       (symbolic ? "in" : "out") + ", oracle " + (v.value ? "in" : "out");
            }
        }
    }
    return c;
}

}  // namespace detail

inline TraceCheck verify_sep_trace(const RepSet& a, const RepSet& b, const std::vector<RepSet>& trace, const ProbeSet& probes)
{
    return detail::check_stages(trace, probes, [&](const RepSet& F) {
        return [fa = F & a, fb = F & b](const Point& x) {
            return OracleVerdict{closure_oracle(fa, x) && closure_oracle(fb, x), Confidence::certified};
        };
    });
}

inline TraceCheck verify_osc_trace(const StepFunction& f, const Rational& eps, const std::vector<RepSet>& trace, const ProbeSet& probes)
{
    return detail::check_stages(trace, probes, [&](const RepSet& F) {
        return [&eps, o = OscillationProbe(f, F)](const Point& x) { return OracleVerdict{o.oscillation(x, eps), Confidence::certified}; };
    });
}

inline TraceCheck verify_osc0_trace(const StepFunction& f, const Rational& eps, const std::vector<RepSet>& trace, const ProbeSet& probes)
{
    return detail::check_stages(trace, probes, [&](const RepSet& F) {
        return [&eps, o = OscillationProbe(f, F)](const Point& x) { return OracleVerdict{o.oscillation0(x, eps), Confidence::certified}; };
    });
}

inline TraceCheck verify_conv_trace(const SeqTemplate& t, const Rational& eps, const std::vector<RepSet>& trace, const ProbeSet& probes,
                                    bool certificate_ok = true)
{
    return detail::check_stages(trace, probes, [&](const RepSet& F) {
        return [&t, &eps, &F, certificate_ok, h = default_seq_horizon(t, F)](const Point& x) {
            if (!x.is_limit() && !x.is_top()) return OracleVerdict{false, Confidence::certified};
            return seq_oscillation_oracle(t, x, F, eps, h, certificate_ok);
        };
    });
}

inline TraceCheck verify_closure(const RepSet& s, const ProbeSet& probes)
{
    TraceCheck c;
    const RepSet cl = closure(s);
    for (const auto& x : probes.points()) {
        ++c.checked;
        const bool o = closure_oracle(s, x);
        if (o != cl.contains(x)) {
            ++c.mismatches;
            if (!c.first_mismatch) c.first_mismatch = "closure of " + s.str() + " at " + x.str();
        }
        if (o != closure_oracle(s, x, default_horizon(s) + 5)) {
            ++c.mismatches;
            if (!c.first_mismatch) c.first_mismatch = "closure oracle horizon unstable for " + s.str() + " at " + x.str();
        }
    }
    return c;
}

}  // namespace kl
