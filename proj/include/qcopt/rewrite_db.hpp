#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qcopt/unitary.hpp"

namespace qcopt {

inline constexpr size_t kDbDefaultCap = 5'000'000;

/// Nonzero multiples of pi/divisor in (-pi, pi], ascending. divisor 4 gives the
/// default 7-angle grid.
std::vector<double> make_angle_grid(int divisor);

/// Phase-normalized, quantized form of a unitary: scale by e^{-i arg(u)} where
/// u is the largest-magnitude entry in row-major order, magnitudes compared
/// after the same 1e-6 quantization as the output so exact ties (common on the
/// pi/4 angle grid) break to the earliest index rather than to float noise.
/// Then round re/im to 6 decimals. Unitaries equal up to phase and at least
/// ~1e-4 away from quantization boundaries produce identical vectors.
std::vector<int32_t> canonical_quantized(const Unitary& U);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t canonical_key(const std::vector<int32_t>& quantized);

struct DbEntry {
    std::vector<int32_t> qmat;  // canonical_quantized of the class representative
    Circuit circuit;            // shortest known decomposition, width = db.q
};

/// Map from canonical unitaries to their shortest decompositions over a
/// discretized gate alphabet, built breadth-first by circuit length so the
/// first insertion is minimal. Hash buckets keep the full quantized matrix, so
/// 64-bit collisions cannot conflate distinct classes.
struct RewriteDB {
    GateSet gs;
    int q = 1;
    std::vector<double> grid;
    int depth = 0;
    bool truncated = false;  // entry cap hit; complete only through depth
    std::unordered_map<uint64_t, std::vector<DbEntry>> buckets;

    size_t size() const;

    /// Shortest stored circuit whose unitary matches U up to global phase, or
    /// nullopt. dim(U) must be 2^q. A hash hit is trusted only after an exact
    /// quantized-matrix match plus a numeric phase-equivalence check.
    std::optional<Circuit> lookup(const Unitary& U) const;
};

/// All placements of the set's kinds on q wires (kind-major, then wires),
/// angles unset. Shared by the DB builder and the synthesis skeleton search.
/// Two-qubit kinds are skipped when q < 2.
std::vector<Gate> enumerate_placements(const GateSet& gs, int q);

/// BFS over circuit length 0..depth with angles drawn from the grid. If the
/// entry cap would be exceeded, the partially enumerated length is discarded
/// and the result is marked truncated (complete through the previous length).
RewriteDB build_db(const GateSet& gs, int q, std::vector<double> grid, int depth,
                   size_t cap = kDbDefaultCap);

void save_db(const RewriteDB& db, const std::filesystem::path& path);
/// verify_entries re-derives every entry's canonical form from its circuit and
/// fails loudly on mismatch (test mode; slow for big files).
RewriteDB load_db(const std::filesystem::path& path, bool verify_entries = false);

/// Always-on peephole pass, to fixpoint: merge wire-adjacent same-kind
/// same-qubit-set rotations by angle addition, drop rotations with angle = 0
/// (mod 2pi, within 1e-12), cancel wire-adjacent CZ pairs. Adjacency means no
/// intervening gate on any shared wire. Unitary preserved up to phase.
Circuit fuse_local(const Circuit& c);

}  // namespace qcopt
