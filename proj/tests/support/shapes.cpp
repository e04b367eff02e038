#include "shapes.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace dropstyle::test
{
	namespace
	{
		using Key = std::array<long, 3>;

		// Surface of a union of axis-aligned cells; a cell is `spacing` wide and
		// each exposed face is cut into the per-axis subdivision counts.
		SurfaceMesh lattice_surface(const std::vector<Voxel> &cells, const Vec3 &spacing, const std::array<int, 3> &sub, const Vec3 &origin)
		{
			const std::set<Voxel> occupied(cells.begin(), cells.end());
			SurfaceMesh out;
			std::map<Key, int> index;
			auto vertex = [&](const Key &k) {
				auto [it, fresh] = index.try_emplace(k, static_cast<int>(out.vertices.size()));
				if (fresh)
					out.vertices.push_back(origin + Vec3(k[0] * spacing[0] / sub[0], k[1] * spacing[1] / sub[1], k[2] * spacing[2] / sub[2]));
				return it->second;
			};
			for (const Voxel &v : occupied)
				for (int a = 0; a < 3; ++a)
					for (int dir : {-1, 1})
					{
						Voxel n = v;
						n[a] += dir;
						if (occupied.count(n))
							continue;
						const int b = (a + 1) % 3, c = (a + 2) % 3;
						for (int u = 0; u < sub[b]; ++u)
							for (int w = 0; w < sub[c]; ++w)
							{
								auto corner = [&](int du, int dw) {
									Key k;
									k[a] = static_cast<long>(v[a] + (dir > 0 ? 1 : 0)) * sub[a];
									k[b] = static_cast<long>(v[b]) * sub[b] + u + du;
									k[c] = static_cast<long>(v[c]) * sub[c] + w + dw;
									return vertex(k);
								};
								int p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1), p01 = corner(0, 1);
								// split along the diagonal through the even lattice corner so
								// every box corner sees the same triangles on all its faces
								const long parity = static_cast<long>(v[a] + (dir > 0 ? 1 : 0)) * sub[a] + static_cast<long>(v[b]) * sub[b] + u + static_cast<long>(v[c]) * sub[c] + w;
								if (parity % 2 != 0)
								{
									std::swap(p00, p10);
									std::swap(p10, p11);
									std::swap(p11, p01);
								}
								if (dir > 0)
								{
									out.faces.push_back({p00, p10, p11});
									out.faces.push_back({p00, p11, p01});
								}
								else
								{
									out.faces.push_back({p00, p11, p10});
									out.faces.push_back({p00, p01, p11});
								}
							}
					}
			return out;
		}
	} // namespace

	SurfaceMesh box(const Vec3 &lo, const Vec3 &hi)
	{
		return lattice_surface({{0, 0, 0}}, hi - lo, {1, 1, 1}, lo);
	}

	SurfaceMesh unit_cube() { return box(Vec3::Zero(), Vec3::Ones()); }

	SurfaceMesh icosphere(double radius, int subdivisions, const Vec3 &center)
	{
		const double t = (1.0 + std::sqrt(5.0)) / 2.0;
		std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
		for (Vec3 &p : v)
			p.normalize();
		std::vector<Face> f = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
		for (int s = 0; s < subdivisions; ++s)
		{
			std::map<std::pair<int, int>, int> mid;
			auto midpoint = [&](int a, int b) {
				const auto key = std::minmax(a, b);
				auto [it, fresh] = mid.try_emplace(key, static_cast<int>(v.size()));
				if (fresh)
					v.push_back((v[a] + v[b]).normalized());
				return it->second;
			};
			std::vector<Face> next;
			for (const Face &tri : f)
			{
				const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
				next.push_back({tri[0], ab, ca});
				next.push_back({tri[1], bc, ab});
				next.push_back({tri[2], ca, bc});
				next.push_back({ab, bc, ca});
			}
			f = std::move(next);
		}
		SurfaceMesh m;
		for (const Vec3 &p : v)
			m.vertices.push_back(center + radius * p);
		m.faces = std::move(f);
		return m;
	}

	SurfaceMesh tube(double inner_radius, double outer_radius, double height, int segments, int layers)
	{
		SurfaceMesh m;
		auto outer = [&](int l, int k) { return (l * segments + (k % segments)) * 2; };
		auto inner = [&](int l, int k) { return (l * segments + (k % segments)) * 2 + 1; };
		for (int l = 0; l <= layers; ++l)
			for (int k = 0; k < segments; ++k)
			{
				const double a = 2.0 * std::numbers::pi * k / segments, z = height * l / layers;
				m.vertices.emplace_back(outer_radius * std::cos(a), outer_radius * std::sin(a), z);
				m.vertices.emplace_back(inner_radius * std::cos(a), inner_radius * std::sin(a), z);
			}
		for (int l = 0; l < layers; ++l)
			for (int k = 0; k < segments; ++k)
			{
				m.faces.push_back({outer(l, k), outer(l, k + 1), outer(l + 1, k + 1)});
				m.faces.push_back({outer(l, k), outer(l + 1, k + 1), outer(l + 1, k)});
				m.faces.push_back({inner(l, k), inner(l + 1, k + 1), inner(l, k + 1)});
				m.faces.push_back({inner(l, k), inner(l + 1, k), inner(l + 1, k + 1)});
			}
		for (int k = 0; k < segments; ++k)
		{
			m.faces.push_back({outer(layers, k), outer(layers, k + 1), inner(layers, k + 1)});
			m.faces.push_back({outer(layers, k), inner(layers, k + 1), inner(layers, k)});
			m.faces.push_back({outer(0, k), inner(0, k + 1), outer(0, k + 1)});
			m.faces.push_back({outer(0, k), inner(0, k), inner(0, k + 1)});
		}
		return m;
	}

	SurfaceMesh slab(double lx, double ly, double t, int nx, int ny)
	{
		return lattice_surface({{0, 0, 0}}, Vec3(lx, ly, t), {nx, ny, 1}, Vec3::Zero());
	}

	SurfaceMesh flat_square()
	{
		SurfaceMesh m;
		m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
		m.faces = {{0, 1, 2}, {0, 2, 3}};
		return m;
	}

	SurfaceMesh voxel_union_surface(const std::vector<Voxel> &voxels, double h, int subdiv, const Vec3 &origin)
	{
		return lattice_surface(voxels, Vec3::Constant(h), {subdiv, subdiv, subdiv}, origin);
	}

	std::vector<Voxel> voxel_block(const Voxel &lo, const Voxel &size)
	{
		std::vector<Voxel> out;
		for (int i = 0; i < size[0]; ++i)
			for (int j = 0; j < size[1]; ++j)
				for (int k = 0; k < size[2]; ++k)
					out.push_back({lo[0] + i, lo[1] + j, lo[2] + k});
		return out;
	}

	SurfaceMesh beam(int nx, int ny, int nz, double h, int subdiv)
	{
		return voxel_union_surface(voxel_block({0, 0, 0}, {nx, ny, nz}), h, subdiv);
	}

	std::vector<Voxel> bridge_voxels(const BridgeShape &s)
	{
		std::vector<Voxel> v = voxel_block({0, 0, s.foot_height}, {s.deck_len, s.width, s.deck_thick});
		for (const Voxel &p : voxel_block({0, 0, 0}, {s.foot_len, s.width, s.foot_height}))
			v.push_back(p);
		for (const Voxel &p : voxel_block({s.deck_len - s.foot_len, 0, 0}, {s.foot_len, s.width, s.foot_height}))
			v.push_back(p);
		return v;
	}

	SurfaceMesh bridge(const BridgeShape &shape, double h, int subdiv)
	{
		return voxel_union_surface(bridge_voxels(shape), h, subdiv);
	}

	TetMesh random_tets(std::mt19937_64 &rng, int count, double scale)
	{
		std::uniform_real_distribution<double> unit(-1.0, 1.0);
		std::vector<Vec3> nodes;
		std::vector<Tet> tets;
		while (static_cast<int>(tets.size()) < count)
		{
			std::array<Vec3, 4> p;
			for (Vec3 &q : p)
				q = scale * Vec3(unit(rng), unit(rng), unit(rng));
			double longest = 0.0;
			for (int a = 0; a < 4; ++a)
				for (int b = a + 1; b < 4; ++b)
					longest = std::max(longest, (p[a] - p[b]).norm());
			const double vol = signed_volume(p[0], p[1], p[2], p[3]);
			if (std::abs(vol) < 0.02 * longest * longest * longest)
				continue;
			if (vol < 0.0)
				std::swap(p[2], p[3]);
			const int base = static_cast<int>(nodes.size());
			for (const Vec3 &q : p)
				nodes.push_back(q);
			tets.push_back({base, base + 1, base + 2, base + 3});
		}
		return TetMesh::build(std::move(nodes), std::move(tets));
	}

	Mat3 random_rotation(std::mt19937_64 &rng)
	{
		std::normal_distribution<double> n(0.0, 1.0);
		Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
		q.normalize();
		return q.toRotationMatrix();
	}

	bool is_watertight(const SurfaceMesh &mesh)
	{
		std::map<std::pair<int, int>, int> uses;
		for (const Face &f : mesh.faces)
			for (int e = 0; e < 3; ++e)
				++uses[std::minmax(f[e], f[(e + 1) % 3])];
		return std::all_of(uses.begin(), uses.end(), [](const auto &kv) { return kv.second == 2; });
	}
} // namespace dropstyle::test
