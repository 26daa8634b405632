// The arc dictionary: string objects as arcs on a surface, realized purely
// combinatorially.  Endpoints are equivalence classes of string ends under
// certified gluability; crossings and gluings are detected through oracle
// mapping cones.  Every structural claim carries a fingerprint certificate.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gentle/oracle.hpp"

namespace gentle {

// A violation of the combinatorial surface model (e.g. a non-linear endpoint
// tournament).  Surfaced, never repaired.
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ArcKind { exceptional, spherelike, crossing };

struct Arc {
  GradedString string;  // canonical class representative (base 0)
  ArcKind kind = ArcKind::exceptional;
  int self_hom = 0;         // hom up to shift to itself
  bool closed = false;      // both ends at one marked point
  int self_crossings = 0;   // (self_hom - (closed ? 2 : 1)) / 2
};

// One end of an arc: end 0 is the left of the word, end 1 the right.
struct EndRef {
  int arc = -1;
  int end = 0;
  bool operator<(const EndRef& o) const { return std::tie(arc, end) < std::tie(o.arc, o.end); }
  bool operator==(const EndRef& o) const { return arc == o.arc && end == o.end; }
};

// A certified gluing outcome: the glued word together with the shift at which
// its complex fingerprint matched the inducing mapping cone.
struct GlueResult {
  GradedString word;
  int shift = 0;
};

enum class RegionKind { terminal, cyclic, terminating };
enum class LoopTag { string_arc, band, ungraded_loop };

class ArcModel {
 public:
  ArcModel(const GentleAlgebra& alg, int field_order = 2);

  const GentleAlgebra& alg;
  Oracle oracle;

  // --- classification ------------------------------------------------------
  Arc classify_arc(const GradedString& s);

  // --- gluing ---------------------------------------------------------------
  // All certified strings obtained by joining the chosen ends.  Empty list
  // means the ends do not share a marked point.
  std::vector<GlueResult> glue(const GradedString& s, int s_end, const GradedString& t, int t_end);

  // --- intersections ---------------------------------------------------------
  struct Intersections {
    int interior = 0;
    // Shared endpoints, attributed to end pairs of (a, b); one entry per
    // endpoint-type basis morphism (one direction only).
    std::vector<std::pair<int, int>> shared_endpoints;
  };
  Intersections intersections(const Arc& a, const Arc& b);

  // --- collections -----------------------------------------------------------
  bool is_arc_collection(const std::vector<Arc>& arcs);
  bool is_connected(const std::vector<Arc>& arcs);

  // Marked-point classes over the 2·n string ends of a collection.  Classes
  // are built by deterministic greedy clustering: two classes merge only when
  // every cross pair of their ends is gluable (raw gluability is coarser than
  // the geometric incidence when an arc's two ends are combinatorially
  // indistinguishable, e.g. lazy strings).  Refused merges are recorded.
  struct MarkedPoints {
    std::vector<int> class_of;  // index 2*arc + end -> class id (0-based)
    int num_classes = 0;
    std::vector<std::pair<int, int>> refused;  // gluable end pairs left unmerged
    int at(const EndRef& e) const { return class_of[2 * e.arc + e.end]; }
  };
  MarkedPoints marked_points(const std::vector<Arc>& arcs);

  // --- decomposition and reduction ---------------------------------------------
  struct Decomposition {
    bool bound_exhausted = false;
    std::vector<GradedString> parts;  // exceptional/spherelike when not exhausted
  };
  Decomposition decompose_string(const GradedString& s);

  struct CollectionResult {
    bool bound_exhausted = false;
    std::vector<Arc> arcs;
    std::vector<int> interior_trace;  // total interior count per round (strictly decreasing)
  };
  CollectionResult reduce_to_collection(const std::vector<GradedString>& generators);

  // --- pointed collections -------------------------------------------------------
  struct PointedCollection {
    std::vector<Arc> arcs;
    MarkedPoints points;
    int basepoint = 0;  // marked-point class id of v
    std::vector<std::string> rewrites;  // human-readable gluing certificates
  };
  // Rewrite a connected collection into a star at the marked point class v.
  PointedCollection to_pointed(const std::vector<Arc>& c, int point_class);

  struct Regions {
    std::vector<EndRef> order;  // H(1..b): half-edges at v in boundary order
    int num_regions = 0;        // regions R_0..R_b, so b + 1 of them
    std::map<int, int> tau;     // defined on non-terminal region indices
    std::vector<RegionKind> kinds;
  };
  Regions regions_and_tau(const PointedCollection& p);

  struct PsiPath {
    GradedString word;
    LoopTag tag = LoopTag::string_arc;
    std::vector<int> orbit;  // visited region indices
  };
  PsiPath psi_path(const PointedCollection& p, const Regions& r, int region);

  // --- helpers shared with the poset layer ------------------------------------------
  // Uncertified concatenation candidates for a chosen end pair (juxtaposition,
  // with reduction, optionally through one connecting letter).
  std::vector<GradedString> glue_candidates(const GradedString& s, int s_end,
                                            const GradedString& t, int t_end);
  // Fingerprints of all minimal basis-morphism cones between the two
  // complexes (both directions, all shifts in the hom window); cached.
  const std::vector<Fingerprint>& pair_cone_fps(const GradedString& s, const GradedString& t);

  std::string key(const GradedString& s);  // canonical class key

 private:
  std::vector<Fingerprint> cone_fps_dir(const ProjComplex& x, const ProjComplex& y);

  // Lazy index of string classes (<= 6 letters) by translated fingerprint,
  // used to identify the two summands of a split cone.
  void ensure_fp_index();
  std::vector<std::pair<GradedString, Fingerprint>> fp_pool_;
  std::map<std::string, GradedString> fp_index_;
  bool fp_index_ready_ = false;

  std::map<std::string, Arc> classify_cache_;
  std::map<std::string, Decomposition> decompose_cache_;
  std::map<std::string, std::vector<GlueResult>> glue_cache_;
  std::map<std::string, std::vector<Fingerprint>> pair_cache_;
};

}  // namespace gentle
