#include "qcopt/optimizer.hpp"

#include <chrono>
#include <cstdio>

#include "qcopt/errors.hpp"
#include "qcopt/unitary.hpp"

namespace qcopt {

const char* verify_mode_name(VerifyMode m) {
    switch (m) {
        case VerifyMode::EVERY_STEP: return "every";
        case VerifyMode::FINAL: return "final";
        case VerifyMode::OFF: return "off";
    }
    throw ConfigError("unknown verify mode");
}

VerifyMode verify_mode_from_name(std::string_view name) {
    if (name == "every") return VerifyMode::EVERY_STEP;
    if (name == "final") return VerifyMode::FINAL;
    if (name == "off") return VerifyMode::OFF;
    throw ConfigError("unknown verify mode '" + std::string(name) +
                      "' (expected every, final, or off)");
}

const char* verify_status_name(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::PASSED: return "passed";
        case VerifyStatus::FAILED: return "failed";
        case VerifyStatus::SKIPPED: return "skipped";
        case VerifyStatus::NOT_CHECKED: return "not-checked";
    }
    throw ConfigError("unknown verify status");
}

void OptimizeConfig::validate(bool has_model) const {
    if (max_iterations < 0 && budget_s < 0 && target_gates < 0)
        throw ConfigError("no stopping criterion: set iterations, budget, or target");
    if ((strategy == Strategy::GUIDED) != has_model)
        throw ConfigError(has_model ? "an attention model is only used by the guided strategy"
                                    : "the guided strategy needs an attention model");
    if (attention_refresh < 0) throw ConfigError("attention refresh period must be >= 0");
    limits.validate();
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
    std::string out = kTraceHeader;
    out += '\n';
    char buf[160];
    for (const TraceRow& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.3f,%d,%d,%d,%d,%d,%d\n", r.iter, r.gates,
                      r.elapsed_ms, r.accepted ? 1 : 0, r.window.q_lo, r.window.q_hi,
                      r.window.t_lo, r.window.t_hi, r.reduced_by);
        out += buf;
    }
    return out;
}

std::optional<Circuit> shorten_block(const Circuit& sub, const GateSet& gs, const RewriteDB* db,
                                     const SynthesisConfig* synth, Rng& rng) {
    const int L = static_cast<int>(sub.size());
    if (L == 0) return std::nullopt;

    Circuit best = fuse_local(sub);
    int best_len = static_cast<int>(best.size());

    const int k = sub.width;
    if (k <= kQubitCap && best_len > 0 && (db || synth)) {
        Unitary U = circuit_unitary(sub);
        if (db && db->gs.kinds == gs.kinds) {
            if (db->q == k) {
                if (auto hit = db->lookup(U); hit && static_cast<int>(hit->size()) < best_len) {
                    best = *hit;
                    best_len = static_cast<int>(best.size());
                }
            } else if (db->q > k) {
                // Widen with idle wires; the hit must not touch them.
                Circuit widened = sub;
                widened.width = db->q;
                Unitary Uw = circuit_unitary(widened);
                if (auto hit = db->lookup(Uw); hit && static_cast<int>(hit->size()) < best_len) {
                    bool fits = true;
                    for (const Gate& g : hit->gates)
                        if (g.q0 >= k || g.q1 >= k) fits = false;
                    if (fits) {
                        best = *hit;
                        best.width = k;
                        best_len = static_cast<int>(best.size());
                    }
                }
            }
        }
        if (synth) {
            if (auto s = synthesize_shorter(U, gs, best_len, *synth, db, rng)) {
                best = *s;
                best_len = static_cast<int>(best.size());
            }
        }
    }
    if (best_len < L) return best;
    return std::nullopt;
}

VerifyStatus verify_equivalence(const Circuit& original, const Circuit& optimized) {
    if (original.width > kQubitCap || optimized.width > kQubitCap) return VerifyStatus::SKIPPED;
    Unitary a = circuit_unitary(original);
    Unitary b = circuit_unitary(optimized);
    return equal_up_to_phase(a, b).equal ? VerifyStatus::PASSED : VerifyStatus::FAILED;
}

namespace {

// Splices seg's middle replaced by cand (width = middle wire count). Returns
// the new circuit after the acceptance-time soundness check, or nullopt.
std::optional<Circuit> accept_candidate(const Circuit& whole, const Segments& seg,
                                        const CompactedBlock& block, const Circuit& cand) {
    Unitary oldU = circuit_unitary(block.sub);
    Unitary newU = circuit_unitary(cand);
    if (!equal_up_to_phase(oldU, newU).equal) return std::nullopt;
    Segments s = seg;
    s.middle_qubits = block.active;
    Circuit next = splice(s, cand);
    next.width = whole.width;
    return next;
}

}  // namespace

OptimizeResult optimize(const Circuit& c, const GateSet& gs, const RewriteDB* db,
                        const UNetModel* model, const OptimizeConfig& cfg) {
    cfg.validate(model != nullptr);
    c.validate();
    for (const Gate& g : c.gates)
        if (gs.index_of(g.kind) < 0)
            throw ConfigError("circuit uses gate kinds outside the gate set");
    if (cfg.verify != VerifyMode::OFF && c.width > kQubitCap)
        throw ConfigError("verification needs width <= " + std::to_string(kQubitCap) +
                          "; rerun with verification off");
    if (model && model->gs.kinds != gs.kinds)
        throw ConfigError("attention model was trained for a different gate set");
    if (db && db->gs.kinds != gs.kinds)
        throw ConfigError("rewrite database was built for a different gate set");

    OptimizeResult res;
    res.circuit = c;
    Rng rng(cfg.seed);
    const SynthesisConfig* synth = cfg.use_synthesis ? &cfg.synth : nullptr;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    std::optional<AttentionMap> attn;

    int iter = 0;
    while (true) {
        if (cfg.target_gates >= 0 && static_cast<int>(res.circuit.size()) <= cfg.target_gates) {
            res.stop_reason = "target";
            break;
        }
        if (cfg.max_iterations >= 0 && iter >= cfg.max_iterations) {
            res.stop_reason = "iterations";
            break;
        }
        if (cfg.budget_s >= 0 && elapsed_s() >= cfg.budget_s) {
            res.stop_reason = "budget";
            break;
        }

        TraceRow row;
        row.iter = iter;
        std::optional<Circuit> next;

        if (!res.circuit.empty()) {
            Segments seg;
            bool have_segments = false;

            if (cfg.strategy == Strategy::UNIFORM_1D) {
                Run1D run = sample_1d(res.circuit, cfg.limits, rng);
                row.window = Window{-1, -1, run.m, run.m + run.n - 1};
                seg.prefix.width = seg.middle.width = seg.suffix.width = res.circuit.width;
                auto& g = run.shuffled.gates;
                seg.prefix.gates.assign(g.begin(), g.begin() + run.m);
                seg.middle.gates.assign(g.begin() + run.m, g.begin() + run.m + run.n);
                seg.suffix.gates.assign(g.begin() + run.m + run.n, g.end());
                have_segments = true;
            } else {
                SlotLayout layout = schedule(res.circuit);
                Window w;
                if (cfg.strategy == Strategy::GUIDED) {
                    bool refresh = !attn || !attn->shape_matches(layout) ||
                                   (cfg.attention_refresh > 0 &&
                                    iter % cfg.attention_refresh == 0);
                    if (refresh) attn = unet_infer(*model, res.circuit, gs);
                    w = sample_2d_guided(layout, *attn, cfg.limits, rng);
                } else {
                    w = sample_2d_uniform(layout, cfg.limits, rng);
                }
                row.window = w;
                if (auto s = split(res.circuit, layout, w)) {
                    seg = std::move(*s);
                    have_segments = true;
                }
            }

            if (have_segments && !seg.middle.empty()) {
                CompactedBlock block = compact(seg.middle);
                if (static_cast<int>(block.active.size()) <= 3) {
                    if (auto cand = shorten_block(block.sub, gs, db, synth, rng))
                        next = accept_candidate(res.circuit, seg, block, *cand);
                }
            }
        }

        if (next) {
            row.accepted = true;
            row.reduced_by = static_cast<int>(res.circuit.size()) - static_cast<int>(next->size());
            res.circuit = std::move(*next);
            ++res.accepted;
            if (cfg.attention_refresh == 0) attn.reset();  // re-infer after the change
        }
        row.gates = static_cast<int>(res.circuit.size());
        row.elapsed_ms = cfg.timing ? elapsed_s() * 1e3 : 0.0;
        res.trace.rows.push_back(row);
        ++iter;

        if (row.accepted && cfg.verify == VerifyMode::EVERY_STEP) {
            if (verify_equivalence(c, res.circuit) == VerifyStatus::FAILED) {
                res.verdict = VerifyStatus::FAILED;
                res.stop_reason = "verify-failed";
                res.iterations = iter;
                return res;
            }
        }
    }
    res.iterations = iter;

    switch (cfg.verify) {
        case VerifyMode::OFF:
            res.verdict = VerifyStatus::NOT_CHECKED;
            break;
        case VerifyMode::EVERY_STEP:
        case VerifyMode::FINAL:
            res.verdict = verify_equivalence(c, res.circuit);
            if (res.verdict == VerifyStatus::FAILED) res.stop_reason = "verify-failed";
            break;
    }
    return res;
}

}  // namespace qcopt
