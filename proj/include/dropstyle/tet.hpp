#pragma once

#include <dropstyle/geometry.hpp>
#include <dropstyle/mesh.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace dropstyle
{
	using Tet = std::array<int, 4>;

	double signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d);

	/// Tetrahedral mesh with positively oriented elements. boundary_nodes is the
	/// sorted set of nodes touching a face that belongs to exactly one tet.
	struct TetMesh
	{
		std::vector<Vec3> nodes;
		std::vector<Tet> tets;
		std::vector<int> boundary_nodes;

		/// Validates indices, reorients inverted tets, rejects degenerate and
		/// duplicate tets, and computes boundary_nodes.
		static TetMesh build(std::vector<Vec3> nodes, std::vector<Tet> tets);

		double volume(std::size_t t) const;
		double total_volume() const;
		std::size_t num_nodes() const { return nodes.size(); }
		std::size_t num_tets() const { return tets.size(); }

		friend bool operator==(const TetMesh &, const TetMesh &) = default;
	};

	/// Shortest edge over the mesh, tightened by sqrt(3) x the smallest element
	/// altitude so flattened elements cannot sneak past the time-step bound.
	double characteristic_length(const TetMesh &tm);
	/// min(shortest edge, sqrt(3) x smallest altitude) of one tet; 0 when inverted.
	double element_length(const TetMesh &tm, std::size_t t);

	/// Grid used by the voxel mesher: origin at the bounding-box minimum, or at
	/// the lattice point of `anchor` just below it when an anchor is given.
	struct VoxelGrid
	{
		Vec3 origin = Vec3::Zero();
		double voxel_size = 0.0;
		std::array<int, 3> dims{0, 0, 0};
	};

	VoxelGrid make_voxel_grid(const SurfaceMesh &mesh, double voxel_size, const std::optional<Vec3> &anchor = std::nullopt);

	/// Inside/outside flag per voxel (x fastest), by majority vote over parity
	/// ray casts along +x, +y and +z. Centers on the surface count as inside.
	std::vector<char> classify_voxels(const SurfaceMesh &mesh, const VoxelGrid &grid);

	/// Splits every inside voxel into 5 tets, alternating the split with voxel
	/// parity so neighbouring voxels share face diagonals. An anchor keeps the
	/// lattice fixed while the surface moves (see make_voxel_grid).
	TetMesh voxel_tetrahedralize(const SurfaceMesh &mesh, double voxel_size, const std::optional<Vec3> &anchor = std::nullopt);

	struct SnapOptions
	{
		double max_move = 0.9;       // in voxel sizes
		double min_quality = 0.5;    // element_length floor per incident tet, in voxel sizes
		int passes = 2;
	};

	/// Pulls boundary nodes onto the closest surface point, backing off any move
	/// that would leave an incident tet shorter than min_quality voxels.
	TetMesh snap_boundary_to_surface(TetMesh tm, const SurfaceMesh &surface, double voxel_size, const SnapOptions &opts = {});

	TetMesh load_tetgen(const std::filesystem::path &node_path, const std::filesystem::path &ele_path);
	void save_tetgen(const TetMesh &tm, const std::filesystem::path &node_path, const std::filesystem::path &ele_path);

	/// Faces owned by a single tet, oriented outward. Vertex i of the result is
	/// tm.boundary_nodes[i].
	SurfaceMesh extract_surface(const TetMesh &tm);

	/// k=1 nearest-neighbour matching between surface vertices and tet boundary
	/// nodes, both normalized to the unit box of their own bounding box.
	struct Correspondence
	{
		std::vector<int> surf_to_tet; ///< surface vertex -> node id in TetMesh::nodes
		std::vector<int> tet_to_surf; ///< k-th boundary node -> surface vertex
		double max_match_distance = 0.0; ///< max surface->node distance, normalized units
		std::size_t num_tet_nodes = 0;
	};

	Correspondence build_correspondence(const SurfaceMesh &surf, const TetMesh &tm);
} // namespace dropstyle
