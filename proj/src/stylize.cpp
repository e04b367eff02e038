#include <dropstyle/errors.hpp>
#include <dropstyle/stylize.hpp>

#include <algorithm>
#include <cmath>

namespace dropstyle
{
	void StyleConfig::validate() const
	{
		if (!(amplitude > 0.0) || !std::isfinite(amplitude))
			throw DomainError("style amplitude must be > 0");
		if (!(frequency > 0.0) || !std::isfinite(frequency))
			throw DomainError("style frequency must be > 0");
		if (octaves < 1)
			throw DomainError("style octaves must be >= 1");
		if (iterations < 1)
			throw DomainError("iteration count must be >= 1");
		if (!(per_iter_cap > 0.0 && per_iter_cap <= 0.01))
			throw DomainError("per-iteration cap must lie in (0, 0.01]");
	}

	namespace
	{
		std::uint64_t splitmix64(std::uint64_t x)
		{
			x += 0x9E3779B97F4A7C15ULL;
			x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
			x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
			return x ^ (x >> 31);
		}

		double lattice_value(std::int64_t i, std::int64_t j, std::int64_t k, std::uint64_t seed)
		{
			std::uint64_t h = splitmix64(seed);
			h = splitmix64(h ^ static_cast<std::uint64_t>(i));
			h = splitmix64(h ^ static_cast<std::uint64_t>(j));
			h = splitmix64(h ^ static_cast<std::uint64_t>(k));
			return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
		}

		double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
	} // namespace

	double value_noise(const Vec3 &p, std::uint64_t seed)
	{
		const double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
		const auto i = static_cast<std::int64_t>(fx), j = static_cast<std::int64_t>(fy), k = static_cast<std::int64_t>(fz);
		const double u = fade(p.x() - fx), v = fade(p.y() - fy), w = fade(p.z() - fz);
		auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
		const double x00 = lerp(lattice_value(i, j, k, seed), lattice_value(i + 1, j, k, seed), u);
		const double x10 = lerp(lattice_value(i, j + 1, k, seed), lattice_value(i + 1, j + 1, k, seed), u);
		const double x01 = lerp(lattice_value(i, j, k + 1, seed), lattice_value(i + 1, j, k + 1, seed), u);
		const double x11 = lerp(lattice_value(i, j + 1, k + 1, seed), lattice_value(i + 1, j + 1, k + 1, seed), u);
		return lerp(lerp(x00, x10, v), lerp(x01, x11, v), w);
	}

	double fractal_noise(const Vec3 &p, std::uint64_t seed, int octaves)
	{
		double sum = 0.0, norm = 0.0, gain = 1.0, freq = 1.0;
		for (int o = 0; o < octaves; ++o)
		{
			sum += gain * value_noise(freq * p, splitmix64(seed + 0x632BE59BD9B4E019ULL * static_cast<std::uint64_t>(o + 1)));
			norm += gain;
			gain *= 0.5;
			freq *= 2.0;
		}
		return std::clamp(sum / norm, -1.0, 1.0);
	}

	StyleTarget style_field(const SurfaceMesh &mesh, const StyleConfig &cfg)
	{
		cfg.validate();
		mesh.validate();
		const BBox box = bounding_box(mesh.vertices);
		StyleTarget st;
		st.diagonal = box.diagonal();
		st.target.resize(mesh.num_vertices());
		st.achieved.assign(mesh.num_vertices(), 0.0);
		if (!(st.diagonal > 0.0))
			return st; // a point mesh has no room for style; targets stay 0
		const double amp = cfg.amplitude * st.diagonal;
		for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
		{
			const Vec3 q = cfg.frequency * (mesh.vertices[i] - box.min) / st.diagonal;
			st.target[i] = amp * fractal_noise(q, cfg.seed, cfg.octaves);
		}
		return st;
	}

	DisplacementField displacement_step(const StyleTarget &target, int iteration, const StyleConfig &cfg)
	{
		if (iteration < 1 || iteration > cfg.iterations)
			throw IterOutOfRange("iteration " + std::to_string(iteration) + " outside [1, " + std::to_string(cfg.iterations) + "]");
		const double cap = cfg.per_iter_cap * target.diagonal;
		const double remaining = static_cast<double>(cfg.iterations - iteration + 1);
		DisplacementField d(target.size(), 0.0);
		for (std::size_t v = 0; v < target.size(); ++v)
			d[v] = std::clamp((target.target[v] - target.achieved[v]) / remaining, -cap, cap);
		return d;
	}

	double style_attainment(const StyleTarget &target)
	{
		double got = 0.0, want = 0.0;
		for (std::size_t v = 0; v < target.size(); ++v)
		{
			got += std::abs(target.achieved[v]);
			want += std::abs(target.target[v]);
		}
		if (want == 0.0)
			return got == 0.0 ? 1.0 : 0.0;
		return got / want;
	}
} // namespace dropstyle
