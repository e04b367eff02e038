#pragma once

#include <dropstyle/field.hpp>
#include <dropstyle/mesh.hpp>

#include <cstdint>

namespace dropstyle
{
	/// Procedural stand-in for a learned stylizer: a seeded fractal value-noise
	/// field sets a signed target offset per vertex, reached in N bounded steps.
	struct StyleConfig
	{
		std::uint64_t seed = 0;
		double amplitude = 0.03;    ///< fraction of the bbox diagonal
		double frequency = 6.0;     ///< noise cycles per bbox diagonal
		int octaves = 3;
		int iterations = 200;
		double per_iter_cap = 0.01; ///< fraction of the bbox diagonal, at most 0.01

		void validate() const;
	};

	struct StyleTarget
	{
		std::vector<double> target;   ///< signed offset along the (evolving) normal
		std::vector<double> achieved; ///< cumulative offset actually applied
		double diagonal = 0.0;        ///< of the mesh the target was built on

		std::size_t size() const { return target.size(); }
	};

	/// Seeded 3-d value noise in [-1, 1], quintic-smoothed trilinear lattice.
	double value_noise(const Vec3 &p, std::uint64_t seed);

	/// Octave sum with gain 0.5 and lacunarity 2, normalized and clamped to [-1, 1].
	double fractal_noise(const Vec3 &p, std::uint64_t seed, int octaves);

	StyleTarget style_field(const SurfaceMesh &mesh, const StyleConfig &cfg);

	/// Unmasked proposal for iteration `iteration` in [1, N]:
	/// (target - achieved) / (N - iteration + 1), clamped to the per-step cap.
	DisplacementField displacement_step(const StyleTarget &target, int iteration, const StyleConfig &cfg);

	/// sum |achieved| / sum |target|, with 0/0 = 1.
	double style_attainment(const StyleTarget &target);
} // namespace dropstyle
