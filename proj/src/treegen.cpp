#include "foliage/treegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "foliage/errors.hpp"
#include "foliage/rng.hpp"

namespace foliage {

const char* to_string(PartTag tag) {
    switch (tag) {
    case PartTag::Trunk: return "trunk";
    case PartTag::Branch: return "branch";
    case PartTag::SubBranch: return "sub-branch";
    case PartTag::Leaf: return "leaf";
    }
    return "?";
}

std::size_t ReferenceTree::leaf_group_count() const {
    std::size_t n = 0;
    std::map<int, bool> seen;
    for (const auto& t : triangles) {
        if (t.tag == PartTag::Leaf && !seen[t.leaf_group]) {
            seen[t.leaf_group] = true;
            ++n;
        }
    }
    return n;
}

namespace {

PartTag parse_tag(const std::string& token, const std::string& origin, int line_no) {
    if (token == "trunk") return PartTag::Trunk;
    if (token == "branch") return PartTag::Branch;
    if (token == "sub-branch") return PartTag::SubBranch;
    if (token == "leaf") return PartTag::Leaf;
    throw ParseError(origin + ":" + std::to_string(line_no) + ": unknown part tag '" + token + "'");
}

[[noreturn]] void parse_fail(const std::string& origin, int line_no, const std::string& what) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

void validate_reference(const ReferenceTree& ref, const std::string& origin) {
    const int nv = static_cast<int>(ref.vertices.size());
    for (const auto& t : ref.triangles) {
        for (int idx : {t.a, t.b, t.c}) {
            if (idx < 0 || idx >= nv) {
                throw ValidationError(origin + ": triangle vertex index " + std::to_string(idx) +
                                      " out of range (vertex count " + std::to_string(nv) + ")");
            }
        }
        if (t.tag == PartTag::Leaf && t.leaf_group < 0) {
            throw ValidationError(origin + ": leaf triangle without a leaf-group id");
        }
        if (t.tag != PartTag::Leaf && t.leaf_group >= 0) {
            throw ValidationError(origin + ": non-leaf triangle carries a leaf-group id");
        }
    }
    for (std::size_t c = 0; c < ref.chains.size(); ++c) {
        const auto& chain = ref.chains[c];
        if (chain.parent != -1 &&
            (chain.parent < 0 || chain.parent >= static_cast<int>(c))) {
            // Parents must precede children; this also rules out cycles.
            throw ValidationError(origin + ": chain " + std::to_string(c) + " has invalid parent " +
                                  std::to_string(chain.parent));
        }
        if (!(chain.radius > 0.0)) {
            throw ValidationError(origin + ": chain " + std::to_string(c) + " radius must be > 0");
        }
        if (chain.vertices.size() < 2) {
            throw ValidationError(origin + ": chain " + std::to_string(c) + " needs at least 2 vertices");
        }
        double length = 0.0;
        for (std::size_t i = 0; i + 1 < chain.vertices.size(); ++i) {
            for (int idx : {chain.vertices[i], chain.vertices[i + 1]}) {
                if (idx < 0 || idx >= nv) {
                    throw ValidationError(origin + ": chain vertex index " + std::to_string(idx) +
                                          " out of range");
                }
            }
            length += distance(ref.vertices[static_cast<std::size_t>(chain.vertices[i])],
                               ref.vertices[static_cast<std::size_t>(chain.vertices[i + 1])]);
        }
        if (!(length > 0.0)) {
            throw ValidationError(origin + ": chain " + std::to_string(c) + " has zero length");
        }
    }
}

} // namespace

ReferenceTree parse_reference(const std::string& text, const std::string& origin) {
    ReferenceTree ref;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;

        if (!header_seen) {
            int version = 0;
            if (kind != "reftree" || !(ls >> version)) parse_fail(origin, line_no, "expected 'reftree <version>' header");
            if (version != 1) parse_fail(origin, line_no, "unsupported reftree version " + std::to_string(version));
            header_seen = true;
            continue;
        }

        if (kind == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) parse_fail(origin, line_no, "bad vertex record");
            ref.vertices.push_back(v);
        } else if (kind == "t") {
            ReferenceTree::Triangle t;
            std::string tag;
            if (!(ls >> t.a >> t.b >> t.c >> tag)) parse_fail(origin, line_no, "bad triangle record");
            t.tag = parse_tag(tag, origin, line_no);
            int gid = -1;
            if (ls >> gid) t.leaf_group = gid;
            ref.triangles.push_back(t);
            ref.tag_counts[static_cast<std::size_t>(t.tag)]++;
        } else if (kind == "s") {
            ReferenceTree::Chain chain;
            if (!(ls >> chain.parent >> chain.radius)) parse_fail(origin, line_no, "bad skeleton record");
            int idx = 0;
            while (ls >> idx) chain.vertices.push_back(idx);
            ref.chains.push_back(chain);
        } else {
            parse_fail(origin, line_no, "unknown record '" + kind + "'");
        }
    }

    if (!header_seen) throw ParseError(origin + ": empty or headerless reference-tree file");
    validate_reference(ref, origin);
    return ref;
}

ReferenceTree load_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open reference-tree file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_reference(buf.str(), path.string());
}

LeafDiskExtraction leaf_disks_from_mesh(const ReferenceTree& ref) {
    struct Accum {
        double area = 0.0;
        Vec3 weighted_centroid;
        Vec3 weighted_normal;
        Vec3 first_normal;
    };
    std::map<int, Accum> groups; // ordered by group id

    for (const auto& t : ref.triangles) {
        if (t.tag != PartTag::Leaf) continue;
        const Vec3& a = ref.vertices[static_cast<std::size_t>(t.a)];
        const Vec3& b = ref.vertices[static_cast<std::size_t>(t.b)];
        const Vec3& c = ref.vertices[static_cast<std::size_t>(t.c)];
        const Vec3 n = cross(b - a, c - a);
        const double area = 0.5 * norm(n);
        Accum& acc = groups[t.leaf_group];
        if (area > 0.0) {
            if (acc.area == 0.0) acc.first_normal = normalized(n);
            acc.area += area;
            acc.weighted_centroid += ((a + b + c) / 3.0) * area;
            acc.weighted_normal += normalized(n) * area;
        }
    }

    LeafDiskExtraction out;
    for (const auto& [gid, acc] : groups) {
        (void)gid;
        if (!(acc.area > 0.0)) {
            ++out.skipped_zero_area;
            continue;
        }
        LeafDisk disk;
        disk.center = acc.weighted_centroid / acc.area;
        Vec3 n = acc.weighted_normal;
        if (norm(n) < 1e-12) n = acc.first_normal; // opposing normals cancelled out
        disk.normal = normalized(n);
        disk.radius = std::sqrt(acc.area / std::numbers::pi);
        out.disks.push_back(disk);
    }
    return out;
}

void validate(const RandomizationParams& params) {
    if (!(params.length_scale_lo > 0.0) || !(params.length_scale_hi >= params.length_scale_lo)) {
        throw ValidationError("randomization: length scale range must satisfy 0 < lo <= hi");
    }
    if (params.curvature_jitter_m < 0.0) throw ValidationError("randomization: curvature jitter must be >= 0");
    if (params.sub_branch_jitter < 0.0) throw ValidationError("randomization: sub-branch jitter must be >= 0");
    if (!(params.leaf_count_scale > 0.0)) throw ValidationError("randomization: leaf count scale must be > 0");
}

namespace {

constexpr double kTrunkRadius = 0.05;

struct Polyline {
    std::vector<Vec3> pts;
    std::vector<double> cum; ///< cumulative arc length per vertex
    double total = 0.0;
};

Polyline make_polyline(std::vector<Vec3> pts) {
    Polyline p;
    p.pts = std::move(pts);
    p.cum.resize(p.pts.size(), 0.0);
    for (std::size_t i = 1; i < p.pts.size(); ++i) {
        p.cum[i] = p.cum[i - 1] + distance(p.pts[i - 1], p.pts[i]);
    }
    p.total = p.cum.back();
    return p;
}

Vec3 point_at(const Polyline& p, double u) {
    const double target = std::clamp(u, 0.0, 1.0) * p.total;
    std::size_t seg = 1;
    while (seg + 1 < p.cum.size() && p.cum[seg] < target) ++seg;
    const double len = p.cum[seg] - p.cum[seg - 1];
    const double s = len > 0.0 ? (target - p.cum[seg - 1]) / len : 0.0;
    return p.pts[seg - 1] + (p.pts[seg] - p.pts[seg - 1]) * s;
}

/// Arc fraction of the point on `p` closest to `q`.
double project_u(const Polyline& p, const Vec3& q) {
    double best_d2 = std::numeric_limits<double>::max();
    double best_arc = 0.0;
    for (std::size_t i = 0; i + 1 < p.pts.size(); ++i) {
        const Vec3& a = p.pts[i];
        const Vec3 ab = p.pts[i + 1] - a;
        const double len2 = dot(ab, ab);
        double s = len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
        const Vec3 candidate = a + ab * s;
        const Vec3 diff = q - candidate;
        const double d2 = dot(diff, diff);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_arc = p.cum[i] + s * (p.cum[i + 1] - p.cum[i]);
        }
    }
    return p.total > 0.0 ? best_arc / p.total : 0.0;
}

struct ProtoChain {
    int parent = -1;
    double radius = 0.0;
    Polyline line;
    std::vector<double> t; ///< chord parameter per vertex (arc fraction)
    double anchor_u = 0.0; ///< arc fraction on the parent
};

struct ProtoLeaf {
    int chain = 0;
    double u = 0.0;
    Vec3 offset; ///< disk center relative to its anchor point
    Vec3 normal;
    double radius = 0.0;
};

struct Prototype {
    std::vector<ProtoChain> chains;
    std::vector<ProtoLeaf> leaves;
};

Prototype build_prototype(const ReferenceTree& ref) {
    Prototype proto;
    proto.chains.reserve(ref.chains.size());
    for (const auto& chain : ref.chains) {
        ProtoChain pc;
        pc.parent = chain.parent;
        pc.radius = chain.radius;
        std::vector<Vec3> pts;
        pts.reserve(chain.vertices.size());
        for (int idx : chain.vertices) pts.push_back(ref.vertices[static_cast<std::size_t>(idx)]);
        pc.line = make_polyline(std::move(pts));
        pc.t.resize(pc.line.pts.size());
        for (std::size_t i = 0; i < pc.line.pts.size(); ++i) {
            pc.t[i] = pc.line.total > 0.0 ? pc.line.cum[i] / pc.line.total : 0.0;
        }
        if (pc.parent >= 0) {
            pc.anchor_u = project_u(proto.chains[static_cast<std::size_t>(pc.parent)].line, pc.line.pts.front());
        }
        proto.chains.push_back(std::move(pc));
    }

    const auto extraction = leaf_disks_from_mesh(ref);
    proto.leaves.reserve(extraction.disks.size());
    for (const auto& disk : extraction.disks) {
        ProtoLeaf pl;
        double best_d2 = std::numeric_limits<double>::max();
        for (std::size_t c = 0; c < proto.chains.size(); ++c) {
            const double u = project_u(proto.chains[c].line, disk.center);
            const Vec3 at = point_at(proto.chains[c].line, u);
            const Vec3 diff = disk.center - at;
            const double d2 = dot(diff, diff);
            if (d2 < best_d2) {
                best_d2 = d2;
                pl.chain = static_cast<int>(c);
                pl.u = u;
                pl.offset = diff;
            }
        }
        pl.normal = disk.normal;
        pl.radius = disk.radius;
        proto.leaves.push_back(pl);
    }
    return proto;
}

/// Orthonormal pair perpendicular to a (non-zero) direction.
std::pair<Vec3, Vec3> perpendicular_basis(const Vec3& dir) {
    const Vec3 d = normalized(dir);
    Vec3 helper = std::abs(d.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = normalized(cross(d, helper));
    const Vec3 e2 = cross(d, e1);
    return {e1, e2};
}

} // namespace

TreeGeometry randomize_tree(const ReferenceTree& ref, const std::vector<BranchAttachment>& attachments,
                            const RandomizationParams& params) {
    validate(params);
    if (attachments.empty()) throw ValidationError("randomize_tree: attachment list is empty");
    if (ref.chains.empty()) throw ValidationError("randomize_tree: reference tree has no skeleton chains");

    const Prototype proto = build_prototype(ref);
    const std::size_t n_ref_leaves = proto.leaves.size();
    const std::size_t n_att = attachments.size();

    // Global leaf budget, spread across instances so the total lands exactly.
    const long long target_total =
        std::llround(static_cast<double>(n_att) * static_cast<double>(n_ref_leaves) * params.leaf_count_scale);
    const long long base = n_att > 0 ? target_total / static_cast<long long>(n_att) : 0;
    const long long remainder = n_att > 0 ? target_total % static_cast<long long>(n_att) : 0;

    TreeGeometry tree;

    double trunk_top = 0.0;
    for (const auto& a : attachments) trunk_top = std::max(trunk_top, a.position.z);
    tree.branches.push_back({{Vec3{0, 0, 0}, Vec3{0, 0, trunk_top}}, kTrunkRadius});

    const double two_pi = 2.0 * std::numbers::pi;

    for (std::size_t k = 0; k < n_att; ++k) {
        Rng rng(derive_seed(params.seed, SeedStream::TreeInstance, k));
        const Mat3 rot = Mat3::rotation_between({0, 0, 1}, normalized(attachments[k].direction));
        const Vec3 origin = attachments[k].position;

        // Deform every chain in the canonical frame, parents first.
        std::vector<Polyline> deformed;
        deformed.reserve(proto.chains.size());
        for (const auto& pc : proto.chains) {
            const double length_mult = rng.uniform(params.length_scale_lo, params.length_scale_hi);
            const double bend_az = rng.uniform(0.0, two_pi);
            const double bend_mag = rng.uniform(0.0, params.curvature_jitter_m);
            const double slide = rng.uniform(-params.sub_branch_jitter, params.sub_branch_jitter);

            const Vec3 root = pc.line.pts.front();
            Vec3 anchor = root;
            if (pc.parent >= 0) {
                const double u_new = std::clamp(pc.anchor_u + slide, 0.0, 1.0);
                anchor = point_at(deformed[static_cast<std::size_t>(pc.parent)], u_new);
            }

            std::vector<Vec3> pts(pc.line.pts.size());
            for (std::size_t i = 0; i < pts.size(); ++i) {
                pts[i] = anchor + (pc.line.pts[i] - root) * length_mult;
            }
            const Vec3 chord = pts.back() - pts.front();
            const auto [e1, e2] = perpendicular_basis(chord);
            const Vec3 bend = (e1 * std::cos(bend_az) + e2 * std::sin(bend_az)) * bend_mag;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double t = pc.t[i];
                pts[i] += bend * (2.0 * t * (1.0 - t)); // mid-chord quadratic bump, endpoints fixed
            }
            deformed.push_back(make_polyline(std::move(pts)));
        }

        // Leaf selection for this instance.
        const long long want = base + (static_cast<long long>(k) < remainder ? 1 : 0);
        std::vector<std::size_t> chosen;
        if (n_ref_leaves > 0 && want > 0) {
            const std::size_t m = static_cast<std::size_t>(want);
            if (m >= n_ref_leaves) {
                chosen.resize(n_ref_leaves);
                for (std::size_t i = 0; i < n_ref_leaves; ++i) chosen[i] = i;
                for (std::size_t extra = n_ref_leaves; extra < m; ++extra) {
                    const std::size_t dup =
                        std::min(n_ref_leaves - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_ref_leaves)));
                    chosen.push_back(dup);
                }
            } else {
                std::vector<std::size_t> pool(n_ref_leaves);
                for (std::size_t i = 0; i < n_ref_leaves; ++i) pool[i] = i;
                for (std::size_t i = 0; i < m; ++i) { // partial Fisher-Yates
                    const std::size_t j =
                        i + std::min(n_ref_leaves - 1 - i,
                                     static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_ref_leaves - i)));
                    std::swap(pool[i], pool[j]);
                }
                chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
                std::sort(chosen.begin(), chosen.end());
            }
        }

        for (std::size_t leaf_idx : chosen) {
            const ProtoLeaf& pl = proto.leaves[leaf_idx];
            const Vec3 center = point_at(deformed[static_cast<std::size_t>(pl.chain)], pl.u) + pl.offset;
            Vec3 normal = pl.normal;
            if (params.leaf_orientation_uniform) normal = rng.unit_sphere();
            LeafDisk disk;
            disk.center = rot * center + origin;
            disk.normal = rot * normal;
            disk.radius = pl.radius;
            tree.leaves.push_back(disk);
        }

        for (std::size_t c = 0; c < deformed.size(); ++c) {
            TreeGeometry::Branch branch;
            branch.radius = proto.chains[c].radius;
            branch.points.reserve(deformed[c].pts.size());
            for (const Vec3& p : deformed[c].pts) branch.points.push_back(rot * p + origin);
            tree.branches.push_back(std::move(branch));
        }
    }

    // Bounding sphere: centroid of all feature points, radius padded by the
    // largest leaf so whole disks stay inside.
    Vec3 centroid;
    std::size_t count = 0;
    double max_leaf_radius = 0.0;
    for (const auto& b : tree.branches) {
        for (const Vec3& p : b.points) {
            centroid += p;
            ++count;
        }
    }
    for (const auto& l : tree.leaves) {
        centroid += l.center;
        ++count;
        max_leaf_radius = std::max(max_leaf_radius, l.radius);
    }
    centroid = centroid / static_cast<double>(count);
    double max_d = 0.0;
    double max_z = 0.0;
    for (const auto& b : tree.branches) {
        for (const Vec3& p : b.points) {
            max_d = std::max(max_d, distance(p, centroid));
            max_z = std::max(max_z, p.z);
        }
    }
    for (const auto& l : tree.leaves) {
        max_d = std::max(max_d, distance(l.center, centroid));
        max_z = std::max(max_z, l.center.z);
    }
    tree.bounding_center = centroid;
    tree.bounding_radius = max_d + max_leaf_radius;
    tree.height = max_z;
    return tree;
}

void save_tree_geometry(const TreeGeometry& tree, const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot write tree geometry file: " + path.string());
    std::fprintf(f, "treegeom 1\n");
    for (const auto& b : tree.branches) {
        std::fprintf(f, "b %.17g %zu", b.radius, b.points.size());
        for (const Vec3& p : b.points) std::fprintf(f, " %.17g %.17g %.17g", p.x, p.y, p.z);
        std::fprintf(f, "\n");
    }
    for (const auto& l : tree.leaves) {
        std::fprintf(f, "l %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", l.center.x, l.center.y, l.center.z,
                     l.normal.x, l.normal.y, l.normal.z, l.radius);
    }
    std::fprintf(f, "bs %.17g %.17g %.17g %.17g\n", tree.bounding_center.x, tree.bounding_center.y,
                 tree.bounding_center.z, tree.bounding_radius);
    std::fclose(f);
}

} // namespace foliage
