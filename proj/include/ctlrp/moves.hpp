#ifndef CTLRP_MOVES_HPP
#define CTLRP_MOVES_HPP

#include <optional>

#include "ctlrp/core.hpp"

namespace ctlrp {

enum class Accept { first, best };
enum class Apply { first, best };

struct MoveStrategy {
    Accept accept = Accept::best;
    Apply apply = Apply::first;
};

enum class MoveKind {
    two_opt,
    swap_intra,
    relocate_intra,
    one_point,
    two_point,
    two_opt_star,
    cross_string,
};

// One candidate move. Positional parameters are operator specific:
//   two_opt          route1, a..b   reversed segment
//   swap_intra       route1, a, b   swapped positions
//   relocate_intra   route1, a -> slot b of the reduced sequence
//   one_point        route1 pos a -> route2 slot b
//   two_point        route1 pos a <-> route2 pos b
//   two_opt_star     cut edges a (route1), b (route2), scenario c in {0,1}
//   cross_string     strings (a, len b) and (c, len d), scenario e in 0..3
struct MoveDelta {
    MoveKind kind = MoveKind::two_opt;
    int route1 = -1;
    int route2 = -1;
    int a = 0, b = 0, c = 0, d = 0, e = 0;
    double delta = 0.0;
};

struct MoveContext {
    bool allow_empty_routes = false;
    int max_string_length = 3;
};

// Per-route scans (intra operators); only strictly improving candidates.
std::optional<MoveDelta> scan_two_opt(const Instance &inst, const Solution &sol, int route,
                                      Accept accept);
std::optional<MoveDelta> scan_swap_intra(const Instance &inst, const Solution &sol, int route,
                                         Accept accept);
std::optional<MoveDelta> scan_relocate_intra(const Instance &inst, const Solution &sol, int route,
                                             Accept accept);

// Per-pair scans (inter operators); feasibility-aware against the loads.
std::optional<MoveDelta> scan_one_point(const Instance &inst, const Solution &sol,
                                        const LoadTable &loads, int r1, int r2, Accept accept,
                                        const MoveContext &ctx = {});
std::optional<MoveDelta> scan_two_point(const Instance &inst, const Solution &sol,
                                        const LoadTable &loads, int r1, int r2, Accept accept);
std::optional<MoveDelta> scan_two_opt_star(const Instance &inst, const Solution &sol,
                                           const LoadTable &loads, int r1, int r2, Accept accept,
                                           const MoveContext &ctx = {});
std::optional<MoveDelta> scan_cross_string(const Instance &inst, const Solution &sol,
                                           const LoadTable &loads, int r1, int r2, Accept accept,
                                           const MoveContext &ctx = {});

// Route / route-pair sweep honoring the accept and apply strategy switches.
// Returns the selected move without applying it.
std::optional<MoveDelta> find_move(const Instance &inst, const Solution &sol, MoveKind kind,
                                   MoveStrategy strategy, const MoveContext &ctx = {});

void apply_move(const Instance &inst, Solution &sol, const MoveDelta &move);

} // namespace ctlrp

#endif
