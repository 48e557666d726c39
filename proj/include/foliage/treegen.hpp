#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "foliage/lsystem.hpp"
#include "foliage/vec3.hpp"

namespace foliage {

enum class PartTag { Trunk = 0, Branch = 1, SubBranch = 2, Leaf = 3 };

const char* to_string(PartTag tag);

/// A leaf reflector: circular disk with an area-equivalent radius.
struct LeafDisk {
    Vec3 center;
    Vec3 normal;   ///< unit
    double radius = 0.0; ///< m, > 0
};

/// Prototype branch assembly loaded from a reference-tree file. Canonical
/// frame: assembly root at the origin, growth axis +z.
struct ReferenceTree {
    struct Triangle {
        int a = 0, b = 0, c = 0;
        PartTag tag = PartTag::Branch;
        int leaf_group = -1; ///< >= 0 iff tag == Leaf
    };
    struct Chain {
        int parent = -1;          ///< index of parent chain, -1 for the root chain
        double radius = 0.0;      ///< m
        std::vector<int> vertices; ///< polyline through the vertex table, root first
    };

    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::vector<Chain> chains;
    std::array<std::size_t, 4> tag_counts{}; ///< triangles per PartTag

    std::size_t leaf_group_count() const;
};

/// Parses and validates a reference-tree file (plain text, versioned; see the
/// README for the record grammar). Throws ParseError with the offending line
/// or ValidationError for dangling indices.
ReferenceTree load_reference(const std::filesystem::path& path);

/// As above, from an in-memory string. `origin` names the source in errors.
ReferenceTree parse_reference(const std::string& text, const std::string& origin = "<memory>");

struct LeafDiskExtraction {
    std::vector<LeafDisk> disks;      ///< one per leaf group, group order
    std::size_t skipped_zero_area = 0; ///< groups dropped for having no area
};

/// Collapses each leaf group to a disk: area-weighted centroid of the group's
/// triangle midpoints, area-weighted mean normal, and radius preserving the
/// total reflecting area (a = sqrt(area / pi)).
LeafDiskExtraction leaf_disks_from_mesh(const ReferenceTree& ref);

struct RandomizationParams {
    double length_scale_lo = 0.8;  ///< per-branch length multiplier range
    double length_scale_hi = 1.2;
    double curvature_jitter_m = 0.05;  ///< max mid-chain control-point offset
    double sub_branch_jitter = 0.1;    ///< anchor slide as a fraction of parent length
    bool leaf_orientation_uniform = true;
    double leaf_count_scale = 1.0;
    std::uint64_t seed = 0;
};

void validate(const RandomizationParams& params);

/// Full randomized tree: curved branch polylines plus leaf disks.
struct TreeGeometry {
    struct Branch {
        std::vector<Vec3> points;
        double radius = 0.0;
    };
    std::vector<Branch> branches; ///< index 0 is the trunk
    std::vector<LeafDisk> leaves;
    Vec3 bounding_center;
    double bounding_radius = 0.0;
    double height = 0.0; ///< max z extent, used for default sensor altitude
};

/// Instantiates the reference assembly at every attachment, randomizing branch
/// lengths, curvatures, sub-branch anchor positions, and leaf placement.
/// Deterministic for a fixed (inputs, seed).
TreeGeometry randomize_tree(const ReferenceTree& ref, const std::vector<BranchAttachment>& attachments,
                            const RandomizationParams& params);

/// Writes a TreeGeometry as a versioned text file (`treegeom 1`); output is
/// byte-stable for identical geometry.
void save_tree_geometry(const TreeGeometry& tree, const std::filesystem::path& path);

} // namespace foliage
