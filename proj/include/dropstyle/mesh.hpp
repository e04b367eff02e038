#pragma once

#include <dropstyle/field.hpp>
#include <dropstyle/geometry.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace dropstyle
{
	/// Triangle surface mesh. Positions are in model units (meters after the
	/// load-time scale). Colors, when present, are per-vertex RGB in [0,1].
	struct SurfaceMesh
	{
		std::vector<Vec3> vertices;
		std::vector<Face> faces;
		std::vector<Vec3> colors;

		std::size_t num_vertices() const { return vertices.size(); }
		std::size_t num_faces() const { return faces.size(); }
		bool has_colors() const { return !colors.empty(); }

		/// Throws TopologyError on out-of-range or repeated face indices and
		/// LengthMismatch when the color array does not match the vertex count.
		void validate() const;

		friend bool operator==(const SurfaceMesh &, const SurfaceMesh &) = default;
	};

	enum class MeshFormat
	{
		obj,
		ply
	};

	enum class PlyEncoding
	{
		ascii,
		binary_little_endian
	};

	/// Picks the format from the file extension (.obj / .ply).
	MeshFormat format_from_path(const std::filesystem::path &path);

	SurfaceMesh load_mesh(const std::filesystem::path &path, std::optional<MeshFormat> format = std::nullopt);
	SurfaceMesh read_obj(std::istream &in);
	SurfaceMesh read_ply(std::istream &in);

	void save_colored_mesh(const SurfaceMesh &mesh, const std::filesystem::path &path,
						   std::optional<MeshFormat> format = std::nullopt,
						   PlyEncoding encoding = PlyEncoding::binary_little_endian);
	void write_obj(const SurfaceMesh &mesh, std::ostream &out);
	void write_ply(const SurfaceMesh &mesh, std::ostream &out, PlyEncoding encoding);

	/// Multiplies every coordinate by `factor`.
	SurfaceMesh scaled(SurfaceMesh mesh, double factor);

	/// Area-weighted vertex normals. Vertices without incident area get +z and a warning.
	std::vector<Vec3> vertex_normals(const SurfaceMesh &mesh);

	double bbox_diagonal(const SurfaceMesh &mesh);

	/// Moves vertex i by d[i] along its normal on the input mesh.
	SurfaceMesh apply_displacement(const SurfaceMesh &mesh, const DisplacementField &d);
	/// Same, with normals supplied by the caller (frozen normals).
	SurfaceMesh apply_displacement(const SurfaceMesh &mesh, const DisplacementField &d, std::span<const Vec3> normals);

	/// Enclosed volume by the divergence theorem (closed, outward-oriented meshes).
	double enclosed_volume(const SurfaceMesh &mesh);
} // namespace dropstyle
