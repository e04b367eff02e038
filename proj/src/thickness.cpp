#include <dropstyle/errors.hpp>
#include <dropstyle/thickness.hpp>

#include <spdlog/spdlog.h>

#include <cmath>

namespace dropstyle
{
	ThicknessResult local_thickness_detailed(const SurfaceMesh &mesh, const ThicknessOptions &opts)
	{
		mesh.validate();
		const std::size_t n = mesh.num_vertices();
		const double diag = bbox_diagonal(mesh);
		if (!(diag > 0.0))
			throw DegenerateNormal("mesh has zero extent");
		const double tol = opts.tolerance_fraction * diag;

		std::vector<Vec3> normals(n, Vec3::Zero());
		for (const Face &f : mesh.faces)
		{
			const Vec3 an = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
			for (int k = 0; k < 3; ++k)
				normals[f[k]] += an;
		}
		for (std::size_t i = 0; i < n; ++i)
		{
			const double len = normals[i].norm();
			if (!(len > 0.0))
				throw DegenerateNormal("vertex " + std::to_string(i) + " has no incident face area");
			normals[i] /= len;
		}

		// vertex-sampled queries cannot resolve walls thinner than the local spacing
		std::vector<double> spacing(n, 0.0), edges(n, 0.0);
		if (opts.spacing_floor)
			for (const Face &f : mesh.faces)
				for (int k = 0; k < 3; ++k)
				{
					const double len = (mesh.vertices[f[(k + 1) % 3]] - mesh.vertices[f[k]]).norm();
					spacing[f[k]] += len;
					spacing[f[(k + 1) % 3]] += len;
					edges[f[k]] += 1.0;
					edges[f[(k + 1) % 3]] += 1.0;
				}

		const KdTree tree(mesh.vertices);
		const TriangleBvh bvh(mesh.vertices, mesh.faces);

		ThicknessResult result;
		result.thickness = ThicknessField(n, 0.0);
		for (std::size_t i = 0; i < n; ++i)
		{
			const Vec3 &p = mesh.vertices[i];
			const Vec3 d = -normals[i];
			const double r0 = 0.5 * diag;
			double r = r0;
			bool fallback = false;
			for (int it = 0; it < opts.max_iterations; ++it)
			{
				const Vec3 c = p + r * d;
				const auto hit = tree.nearest(c);
				if (hit.index == static_cast<int>(i) || std::sqrt(hit.distance2) >= r - tol)
					break;
				const Vec3 pq = mesh.vertices[hit.index] - p;
				const double along = d.dot(pq);
				const double r_new = along > 0.0 ? pq.squaredNorm() / (2.0 * along) : -1.0;
				if (!(r_new > 0.0) || !std::isfinite(r_new))
				{
					fallback = true;
					break;
				}
				const bool converged = std::abs(r - r_new) < tol;
				r = std::min(r, r_new);
				if (converged)
					break;
			}
			// a ball that never shrank found no opposite side: treat like an open mesh
			if (r == r0)
				fallback = true;

			double t = 2.0 * r;
			if (fallback)
			{
				++result.ray_fallbacks;
				const auto hit = bvh.first_hit(p, d, tol);
				t = hit ? *hit : diag;
			}
			if (opts.spacing_floor && edges[i] > 0.0)
				t = std::max(t, spacing[i] / edges[i]);
			result.thickness[i] = std::clamp(t, tol, diag);
		}
		if (n > 0 && result.ray_fallbacks == n)
			spdlog::warn("OpenMeshWarning: every vertex needed the ray-cast fallback; is the mesh closed?");
		return result;
	}

	ThicknessField local_thickness(const SurfaceMesh &mesh, const ThicknessOptions &opts)
	{
		return local_thickness_detailed(mesh, opts).thickness;
	}
} // namespace dropstyle
