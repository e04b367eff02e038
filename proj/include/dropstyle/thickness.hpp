#pragma once

#include <dropstyle/field.hpp>
#include <dropstyle/mesh.hpp>

namespace dropstyle
{
	struct ThicknessOptions
	{
		double tolerance_fraction = 1e-4; ///< of the bounding-box diagonal
		int max_iterations = 30;
		bool spacing_floor = true; ///< no value below the vertex's mean incident edge length
	};

	struct ThicknessResult
	{
		ThicknessField thickness;
		std::size_t ray_fallbacks = 0; ///< vertices resolved by an inward ray cast
	};

	/// Shrinking-sphere local thickness: diameter of the largest vertex-free ball
	/// tangent at each vertex on the inside. Throws DegenerateNormal for
	/// vertices without incident area.
	ThicknessResult local_thickness_detailed(const SurfaceMesh &mesh, const ThicknessOptions &opts = {});

	ThicknessField local_thickness(const SurfaceMesh &mesh, const ThicknessOptions &opts = {});
} // namespace dropstyle
