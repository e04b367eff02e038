#include <dropstyle/errors.hpp>
#include <dropstyle/tet.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace dropstyle
{
	double signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d)
	{
		return (b - a).dot((c - a).cross(d - a)) / 6.0;
	}

	namespace
	{
		using FaceKey = std::array<int, 3>;

		FaceKey sorted_key(int a, int b, int c)
		{
			FaceKey k{a, b, c};
			std::sort(k.begin(), k.end());
			return k;
		}

		// Outward faces of a positively oriented tet, face j opposite vertex j.
		std::array<Face, 4> outward_faces(const Tet &t)
		{
			return {Face{t[1], t[2], t[3]}, Face{t[0], t[3], t[2]}, Face{t[0], t[1], t[3]}, Face{t[0], t[2], t[1]}};
		}

		struct FaceRecord
		{
			FaceKey key;
			int tet;
			int local;
			bool operator<(const FaceRecord &o) const { return key < o.key || (key == o.key && tet < o.tet); }
		};

		// Faces that appear in exactly one tet, in (sorted key) order.
		std::vector<FaceRecord> boundary_faces(const std::vector<Tet> &tets)
		{
			std::vector<FaceRecord> recs;
			recs.reserve(tets.size() * 4);
			for (std::size_t t = 0; t < tets.size(); ++t)
			{
				const auto faces = outward_faces(tets[t]);
				for (int j = 0; j < 4; ++j)
					recs.push_back({sorted_key(faces[j][0], faces[j][1], faces[j][2]), static_cast<int>(t), j});
			}
			std::sort(recs.begin(), recs.end());
			std::vector<FaceRecord> out;
			for (std::size_t i = 0; i < recs.size();)
			{
				std::size_t j = i + 1;
				while (j < recs.size() && recs[j].key == recs[i].key)
					++j;
				if (j - i == 1)
					out.push_back(recs[i]);
				i = j;
			}
			return out;
		}
	} // namespace

	TetMesh TetMesh::build(std::vector<Vec3> nodes, std::vector<Tet> tets)
	{
		TetMesh tm;
		tm.nodes = std::move(nodes);
		tm.tets = std::move(tets);
		const int n = static_cast<int>(tm.nodes.size());
		const double scale = bounding_box(tm.nodes).diagonal();
		const double vol_eps = 1e-14 * scale * scale * scale;

		std::vector<std::array<int, 4>> keys;
		keys.reserve(tm.tets.size());
		for (std::size_t t = 0; t < tm.tets.size(); ++t)
		{
			Tet &tet = tm.tets[t];
			for (int k = 0; k < 4; ++k)
				if (tet[k] < 0 || tet[k] >= n)
					throw TopologyError("tet " + std::to_string(t) + " references node " + std::to_string(tet[k]) + " of " + std::to_string(n));
			double v = signed_volume(tm.nodes[tet[0]], tm.nodes[tet[1]], tm.nodes[tet[2]], tm.nodes[tet[3]]);
			if (std::abs(v) <= vol_eps)
				throw TopologyError("tet " + std::to_string(t) + " is degenerate");
			if (v < 0.0)
				std::swap(tet[2], tet[3]);
			std::array<int, 4> key = tet;
			std::sort(key.begin(), key.end());
			keys.push_back(key);
		}
		std::sort(keys.begin(), keys.end());
		if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
			throw TopologyError("duplicate tets");

		std::vector<char> on_boundary(n, 0);
		for (const FaceRecord &rec : boundary_faces(tm.tets))
			for (int v : rec.key)
				on_boundary[v] = 1;
		for (int i = 0; i < n; ++i)
			if (on_boundary[i])
				tm.boundary_nodes.push_back(i);
		return tm;
	}

	double TetMesh::volume(std::size_t t) const
	{
		const Tet &tet = tets[t];
		return signed_volume(nodes[tet[0]], nodes[tet[1]], nodes[tet[2]], nodes[tet[3]]);
	}

	double TetMesh::total_volume() const
	{
		double v = 0.0;
		for (std::size_t t = 0; t < tets.size(); ++t)
			v += volume(t);
		return v;
	}

	double element_length(const TetMesh &tm, std::size_t t)
	{
		const Tet &tet = tm.tets[t];
		double h = std::numeric_limits<double>::infinity();
		for (int i = 0; i < 4; ++i)
			for (int j = i + 1; j < 4; ++j)
				h = std::min(h, (tm.nodes[tet[i]] - tm.nodes[tet[j]]).norm());
		const double vol = tm.volume(t);
		if (vol <= 0.0)
			return 0.0;
		for (const Face &f : outward_faces(tet))
		{
			const double area = 0.5 * (tm.nodes[f[1]] - tm.nodes[f[0]]).cross(tm.nodes[f[2]] - tm.nodes[f[0]]).norm();
			if (area > 0.0)
				h = std::min(h, std::sqrt(3.0) * 3.0 * vol / area);
		}
		return h;
	}

	double characteristic_length(const TetMesh &tm)
	{
		double h = std::numeric_limits<double>::infinity();
		for (std::size_t t = 0; t < tm.tets.size(); ++t)
			h = std::min(h, element_length(tm, t));
		return h;
	}

	// ------------------------------------------------------------ voxelizer

	VoxelGrid make_voxel_grid(const SurfaceMesh &mesh, double voxel_size, const std::optional<Vec3> &anchor)
	{
		if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
			throw DomainError("voxel size must be positive");
		if (mesh.vertices.empty())
			throw EmptyMesh("cannot voxelize a mesh without vertices");
		const BBox box = bounding_box(mesh.vertices);
		VoxelGrid grid;
		grid.origin = box.min;
		if (anchor)
			for (int a = 0; a < 3; ++a)
				grid.origin[a] = (*anchor)[a] + std::floor((box.min[a] - (*anchor)[a]) / voxel_size + 1e-9) * voxel_size;
		grid.voxel_size = voxel_size;
		std::int64_t total = 1;
		for (int a = 0; a < 3; ++a)
		{
			const double cells = (box.max[a] - grid.origin[a]) / voxel_size;
			grid.dims[a] = std::max(1, static_cast<int>(std::ceil(cells - 1e-9)));
			total *= grid.dims[a];
		}
		if (total > 256LL * 256 * 256)
			throw ResolutionError("voxel grid of " + std::to_string(total) + " cells is too fine");
		return grid;
	}

	namespace
	{
		struct Pt2
		{
			double x, y;
		};

		bool lex_less(const Pt2 &a, const Pt2 &b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

		// error-free transformations, used when the filtered sign is uncertain
		void two_diff(double a, double b, double &x, double &y)
		{
			x = a - b;
			const double bv = a - x;
			const double av = x + bv;
			y = (a - av) + (bv - b);
		}

		void two_sum(double a, double b, double &x, double &y)
		{
			x = a + b;
			const double bv = x - a;
			const double av = x - bv;
			y = (a - av) + (b - bv);
		}

		// adds q to a nonoverlapping expansion kept in increasing magnitude
		void grow_expansion(std::vector<double> &e, double q)
		{
			std::vector<double> out;
			out.reserve(e.size() + 1);
			for (double c : e)
			{
				double sum, err;
				two_sum(q, c, sum, err);
				if (err != 0.0)
					out.push_back(err);
				q = sum;
			}
			if (q != 0.0)
				out.push_back(q);
			e.swap(out);
		}

		int exact_orient_sign(const Pt2 &a, const Pt2 &b, const Pt2 &p)
		{
			double d[4][2];
			two_diff(b.x, a.x, d[0][0], d[0][1]);
			two_diff(p.y, a.y, d[1][0], d[1][1]);
			two_diff(b.y, a.y, d[2][0], d[2][1]);
			two_diff(p.x, a.x, d[3][0], d[3][1]);
			std::vector<double> e;
			for (int sgn = 0; sgn < 2; ++sgn)
			{
				const double *u = d[2 * sgn], *v = d[2 * sgn + 1];
				for (int i = 0; i < 2; ++i)
					for (int j = 0; j < 2; ++j)
					{
						const double hi = u[i] * v[j];
						const double lo = std::fma(u[i], v[j], -hi);
						grow_expansion(e, sgn ? -lo : lo);
						grow_expansion(e, sgn ? -hi : hi);
					}
			}
			if (e.empty())
				return 0;
			return e.back() > 0.0 ? 1 : -1;
		}

		// Edge function of the directed edge a->b at p, evaluated in a canonical
		// endpoint order so the two triangles sharing an edge see exact negations.
		// The sign is exact; the magnitude is only used for barycentric weights.
		double edge_fn(const Pt2 &a, const Pt2 &b, const Pt2 &p)
		{
			if (lex_less(b, a))
				return -edge_fn(b, a, p);
			const double l = (b.x - a.x) * (p.y - a.y), r = (b.y - a.y) * (p.x - a.x);
			const double det = l - r;
			if (std::abs(det) > 3.3306690738754716e-16 * (std::abs(l) + std::abs(r)))
				return det;
			const int sign = exact_orient_sign(a, b, p);
			if (sign == 0)
				return 0.0;
			return sign * std::max(std::abs(det), std::numeric_limits<double>::min());
		}

		// Tie rule for points exactly on an edge of a counter-clockwise triangle:
		// equivalent to nudging p by an infinitesimal (1, eta) offset.
		bool owns_edge(const Pt2 &a, const Pt2 &b)
		{
			const double dx = b.x - a.x, dy = b.y - a.y;
			return dy < 0.0 || (dy == 0.0 && dx > 0.0);
		}

		// If p is inside the projected triangle, writes barycentric weights.
		bool inside_2d(Pt2 a, Pt2 b, Pt2 c, const Pt2 &p, double w[3])
		{
			double area = edge_fn(a, b, c);
			if (area == 0.0)
				return false;
			int order[3] = {0, 1, 2};
			if (area < 0.0)
			{
				std::swap(b, c);
				std::swap(order[1], order[2]);
			}
			const double e0 = edge_fn(b, c, p); // weight of a
			const double e1 = edge_fn(c, a, p); // weight of b
			const double e2 = edge_fn(a, b, p); // weight of c
			auto ok = [](double e, const Pt2 &u, const Pt2 &v) { return e > 0.0 || (e == 0.0 && owns_edge(u, v)); };
			if (!ok(e0, b, c) || !ok(e1, c, a) || !ok(e2, a, b))
				return false;
			const double sum = e0 + e1 + e2;
			if (sum <= 0.0)
				return false;
			w[order[0]] = e0 / sum;
			w[order[1]] = e1 / sum;
			w[order[2]] = e2 / sum;
			return true;
		}
	} // namespace

	std::vector<char> classify_voxels(const SurfaceMesh &mesh, const VoxelGrid &grid)
	{
		const auto [nx, ny, nz] = grid.dims;
		const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
		const double h = grid.voxel_size;
		auto center = [&](int i, int a) { return grid.origin[a] + (i + 0.5) * h; };
		auto vidx = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * ny + j) * nx + i; };

		std::vector<unsigned char> votes(total, 0);
		for (int axis = 0; axis < 3; ++axis)
		{
			const int u = (axis + 1) % 3, w = (axis + 2) % 3;
			const int nu = grid.dims[u], nw = grid.dims[w], na = grid.dims[axis];
			std::vector<std::vector<double>> columns(static_cast<std::size_t>(nu) * nw);
			for (const Face &f : mesh.faces)
			{
				const Vec3 &p0 = mesh.vertices[f[0]], &p1 = mesh.vertices[f[1]], &p2 = mesh.vertices[f[2]];
				const Pt2 a{p0[u], p0[w]}, b{p1[u], p1[w]}, c{p2[u], p2[w]};
				const double umin = std::min({a.x, b.x, c.x}), umax = std::max({a.x, b.x, c.x});
				const double wmin = std::min({a.y, b.y, c.y}), wmax = std::max({a.y, b.y, c.y});
				// one column of slack: rounding here must not drop a tie the edge rule would keep
				const int iu0 = std::max(0, static_cast<int>(std::ceil((umin - grid.origin[u]) / h - 0.5)) - 1);
				const int iu1 = std::min(nu - 1, static_cast<int>(std::floor((umax - grid.origin[u]) / h - 0.5)) + 1);
				const int iw0 = std::max(0, static_cast<int>(std::ceil((wmin - grid.origin[w]) / h - 0.5)) - 1);
				const int iw1 = std::min(nw - 1, static_cast<int>(std::floor((wmax - grid.origin[w]) / h - 0.5)) + 1);
				for (int iw = iw0; iw <= iw1; ++iw)
					for (int iu = iu0; iu <= iu1; ++iu)
					{
						double bary[3];
						if (inside_2d(a, b, c, {center(iu, u), center(iw, w)}, bary))
							columns[static_cast<std::size_t>(iw) * nu + iu].push_back(bary[0] * p0[axis] + bary[1] * p1[axis] + bary[2] * p2[axis]);
					}
			}
			for (int iw = 0; iw < nw; ++iw)
				for (int iu = 0; iu < nu; ++iu)
				{
					auto &col = columns[static_cast<std::size_t>(iw) * nu + iu];
					std::sort(col.begin(), col.end());
					std::size_t above = col.size(); // crossings strictly past the current center
					std::size_t first = 0;
					for (int ia = 0; ia < na; ++ia)
					{
						const double ca = center(ia, axis);
						while (first < col.size() && col[first] <= ca)
							++first;
						above = col.size() - first;
						if (above % 2 == 1)
						{
							int ijk[3];
							ijk[axis] = ia;
							ijk[u] = iu;
							ijk[w] = iw;
							++votes[vidx(ijk[0], ijk[1], ijk[2])];
						}
					}
				}
		}

		std::vector<char> inside(total, 0);
		std::size_t disagreements = 0, count = 0;
		for (std::size_t v = 0; v < total; ++v)
		{
			inside[v] = votes[v] >= 2;
			if (votes[v] == 1 || votes[v] == 2)
				++disagreements;
			count += inside[v];
		}

		// voxel centers lying on the surface count as inside
		const double tol = 1e-9 * std::max(grid.voxel_size, bounding_box(mesh.vertices).diagonal());
		for (const Face &f : mesh.faces)
		{
			const Vec3 &p0 = mesh.vertices[f[0]], &p1 = mesh.vertices[f[1]], &p2 = mesh.vertices[f[2]];
			std::array<int, 3> lo, hi;
			for (int a = 0; a < 3; ++a)
			{
				const double mn = std::min({p0[a], p1[a], p2[a]}) - tol, mx = std::max({p0[a], p1[a], p2[a]}) + tol;
				lo[a] = std::max(0, static_cast<int>(std::ceil((mn - grid.origin[a]) / h - 0.5)));
				hi[a] = std::min(grid.dims[a] - 1, static_cast<int>(std::floor((mx - grid.origin[a]) / h - 0.5)));
			}
			const Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
			for (int k = lo[2]; k <= hi[2]; ++k)
				for (int j = lo[1]; j <= hi[1]; ++j)
					for (int i = lo[0]; i <= hi[0]; ++i)
					{
						const std::size_t v = vidx(i, j, k);
						if (inside[v])
							continue;
						const Vec3 c(center(i, 0), center(j, 1), center(k, 2));
						if (std::abs(n.dot(c - p0)) > tol)
							continue;
						if ((closest_point_on_triangle(c, p0, p1, p2) - c).norm() <= tol)
						{
							inside[v] = 1;
							++count;
						}
					}
		}

		if (disagreements > 0)
		{
			const double allowed = 8.0 + 0.05 * static_cast<double>(count);
			if (static_cast<double>(disagreements) > allowed)
				throw OpenMeshError(std::to_string(disagreements) + " voxels got conflicting parity votes; is the mesh closed?");
			spdlog::debug("{} voxels had split parity votes", disagreements);
		}
		return inside;
	}

	TetMesh voxel_tetrahedralize(const SurfaceMesh &mesh, double voxel_size, const std::optional<Vec3> &anchor)
	{
		mesh.validate();
		const VoxelGrid grid = make_voxel_grid(mesh, voxel_size, anchor);
		const std::vector<char> inside = classify_voxels(mesh, grid);
		const auto [nx, ny, nz] = grid.dims;

		const std::size_t lx = nx + 1, ly = ny + 1;
		auto lattice = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * ly + j) * lx + i; };
		std::vector<int> node_id(lx * ly * (nz + 1), -1);

		// corner c = a + 2b + 4c  <->  offset (a, b, c)
		static constexpr int even_split[5][4] = {{1, 2, 4, 7}, {0, 1, 2, 4}, {3, 1, 2, 7}, {5, 1, 4, 7}, {6, 2, 4, 7}};
		static constexpr int odd_split[5][4] = {{0, 3, 5, 6}, {1, 0, 3, 5}, {2, 0, 3, 6}, {4, 0, 5, 6}, {7, 3, 5, 6}};

		std::vector<std::array<std::size_t, 4>> lattice_tets;
		for (int k = 0; k < nz; ++k)
			for (int j = 0; j < ny; ++j)
				for (int i = 0; i < nx; ++i)
				{
					if (!inside[(static_cast<std::size_t>(k) * ny + j) * nx + i])
						continue;
					std::size_t corner[8];
					for (int c = 0; c < 8; ++c)
						corner[c] = lattice(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
					const auto &split = ((i + j + k) % 2 == 0) ? even_split : odd_split;
					for (const auto &t : split)
						lattice_tets.push_back({corner[t[0]], corner[t[1]], corner[t[2]], corner[t[3]]});
				}
		if (lattice_tets.empty())
			throw ResolutionError("no voxel center falls inside the mesh at voxel size " + std::to_string(voxel_size));

		for (const auto &t : lattice_tets)
			for (std::size_t l : t)
				node_id[l] = 0;
		std::vector<Vec3> nodes;
		for (int k = 0; k <= nz; ++k)
			for (int j = 0; j <= ny; ++j)
				for (int i = 0; i <= nx; ++i)
				{
					const std::size_t l = lattice(i, j, k);
					if (node_id[l] < 0)
						continue;
					node_id[l] = static_cast<int>(nodes.size());
					nodes.push_back(grid.origin + voxel_size * Vec3(i, j, k));
				}
		std::vector<Tet> tets;
		tets.reserve(lattice_tets.size());
		for (const auto &t : lattice_tets)
			tets.push_back({node_id[t[0]], node_id[t[1]], node_id[t[2]], node_id[t[3]]});
		return TetMesh::build(std::move(nodes), std::move(tets));
	}

	TetMesh snap_boundary_to_surface(TetMesh tm, const SurfaceMesh &surface, double voxel_size, const SnapOptions &opts)
	{
		const std::size_t n = tm.nodes.size();
		std::vector<int> offsets(n + 1, 0), incident;
		for (const Tet &t : tm.tets)
			for (int v : t)
				++offsets[v + 1];
		for (std::size_t i = 0; i < n; ++i)
			offsets[i + 1] += offsets[i];
		incident.resize(offsets[n]);
		{
			std::vector<int> fill(offsets.begin(), offsets.end() - 1);
			for (std::size_t t = 0; t < tm.tets.size(); ++t)
				for (int v : tm.tets[t])
					incident[fill[v]++] = static_cast<int>(t);
		}
		const TriangleBvh bvh(surface.vertices, surface.faces);
		const double max_move2 = std::pow(opts.max_move * voxel_size, 2);
		const double done_tol = 1e-9 * voxel_size;
		const double min_length = opts.min_quality * voxel_size;

		for (int pass = 0; pass < opts.passes; ++pass)
		{
			for (int node : tm.boundary_nodes)
			{
				const Vec3 x = tm.nodes[node];
				const auto hit = bvh.closest_point(x, max_move2);
				if (hit.face < 0)
					continue;
				const Vec3 u = hit.point - x;
				if (u.norm() <= done_tol)
					continue;
				for (double s : {1.0, 0.75, 0.5, 0.25})
				{
					tm.nodes[node] = x + s * u;
					bool ok = true;
					for (int k = offsets[node]; k < offsets[node + 1] && ok; ++k)
						ok = element_length(tm, incident[k]) >= min_length;
					if (ok)
						break;
					tm.nodes[node] = x;
				}
			}
		}
		return tm;
	}

	// --------------------------------------------------------------- tetgen

	namespace
	{
		std::vector<std::vector<std::string>> tetgen_lines(const std::filesystem::path &path)
		{
			std::ifstream in(path);
			if (!in)
				throw IoError("cannot open '" + path.string() + "'");
			std::vector<std::vector<std::string>> lines;
			std::string line;
			while (std::getline(in, line))
			{
				const auto hash = line.find('#');
				if (hash != std::string::npos)
					line.resize(hash);
				std::istringstream ss(line);
				std::vector<std::string> tok;
				std::string t;
				while (ss >> t)
					tok.push_back(t);
				if (!tok.empty())
					lines.push_back(std::move(tok));
			}
			return lines;
		}

		long to_long(const std::string &s, const std::filesystem::path &path)
		{
			std::size_t pos = 0;
			long v = 0;
			try
			{
				v = std::stol(s, &pos);
			}
			catch (const std::exception &)
			{
				pos = 0;
			}
			if (pos != s.size())
				throw ParseError(path.string() + ": bad integer '" + s + "'");
			return v;
		}

		double to_double(const std::string &s, const std::filesystem::path &path)
		{
			char *end = nullptr;
			const double v = std::strtod(s.c_str(), &end);
			if (end != s.c_str() + s.size() || !std::isfinite(v))
				throw ParseError(path.string() + ": bad number '" + s + "'");
			return v;
		}
	} // namespace

	TetMesh load_tetgen(const std::filesystem::path &node_path, const std::filesystem::path &ele_path)
	{
		const auto node_lines = tetgen_lines(node_path);
		if (node_lines.empty() || node_lines[0].size() < 2)
			throw ParseError(node_path.string() + ": missing header");
		const long n = to_long(node_lines[0][0], node_path);
		if (to_long(node_lines[0][1], node_path) != 3)
			throw ParseError(node_path.string() + ": only 3-d node files are supported");
		if (n <= 0 || static_cast<long>(node_lines.size()) < n + 1)
			throw ParseError(node_path.string() + ": expected " + std::to_string(n) + " nodes");

		const long base = to_long(node_lines[1][0], node_path);
		if (base != 0 && base != 1)
			throw IndexBaseError(node_path.string() + ": first node index is " + std::to_string(base) + ", expected 0 or 1");

		std::vector<Vec3> nodes(n);
		for (long i = 0; i < n; ++i)
		{
			const auto &tok = node_lines[i + 1];
			if (tok.size() < 4)
				throw ParseError(node_path.string() + ": node line " + std::to_string(i) + " is short");
			if (to_long(tok[0], node_path) != i + base)
				throw IndexBaseError(node_path.string() + ": node indices are not consecutive from " + std::to_string(base));
			nodes[i] = {to_double(tok[1], node_path), to_double(tok[2], node_path), to_double(tok[3], node_path)};
		}

		const auto ele_lines = tetgen_lines(ele_path);
		if (ele_lines.empty() || ele_lines[0].size() < 2)
			throw ParseError(ele_path.string() + ": missing header");
		const long m = to_long(ele_lines[0][0], ele_path);
		if (to_long(ele_lines[0][1], ele_path) != 4)
			throw ParseError(ele_path.string() + ": only linear (4-node) tets are supported");
		if (m <= 0 || static_cast<long>(ele_lines.size()) < m + 1)
			throw ParseError(ele_path.string() + ": expected " + std::to_string(m) + " tets");
		std::vector<Tet> tets(m);
		for (long t = 0; t < m; ++t)
		{
			const auto &tok = ele_lines[t + 1];
			if (tok.size() < 5)
				throw ParseError(ele_path.string() + ": tet line " + std::to_string(t) + " is short");
			for (int k = 0; k < 4; ++k)
			{
				const long idx = to_long(tok[k + 1], ele_path) - base;
				if (idx < 0 || idx >= n)
					throw IndexBaseError(ele_path.string() + ": node index " + tok[k + 1] + " out of range for base " + std::to_string(base));
				tets[t][k] = static_cast<int>(idx);
			}
		}
		return TetMesh::build(std::move(nodes), std::move(tets));
	}

	void save_tetgen(const TetMesh &tm, const std::filesystem::path &node_path, const std::filesystem::path &ele_path)
	{
		std::ofstream node_out(node_path), ele_out(ele_path);
		if (!node_out || !ele_out)
			throw IoError("cannot write tetgen files '" + node_path.string() + "'");
		node_out << std::setprecision(std::numeric_limits<double>::max_digits10);
		node_out << tm.nodes.size() << " 3 0 0\n";
		for (std::size_t i = 0; i < tm.nodes.size(); ++i)
			node_out << i << ' ' << tm.nodes[i].x() << ' ' << tm.nodes[i].y() << ' ' << tm.nodes[i].z() << '\n';
		ele_out << tm.tets.size() << " 4 0\n";
		for (std::size_t t = 0; t < tm.tets.size(); ++t)
			ele_out << t << ' ' << tm.tets[t][0] << ' ' << tm.tets[t][1] << ' ' << tm.tets[t][2] << ' ' << tm.tets[t][3] << '\n';
		if (!node_out || !ele_out)
			throw IoError("write failed for tetgen files");
	}

	// ------------------------------------------------------ surface, matching

	SurfaceMesh extract_surface(const TetMesh &tm)
	{
		std::vector<int> remap(tm.nodes.size(), -1);
		SurfaceMesh surf;
		surf.vertices.reserve(tm.boundary_nodes.size());
		for (int node : tm.boundary_nodes)
		{
			remap[node] = static_cast<int>(surf.vertices.size());
			surf.vertices.push_back(tm.nodes[node]);
		}
		for (const FaceRecord &rec : boundary_faces(tm.tets))
		{
			const Face f = outward_faces(tm.tets[rec.tet])[rec.local];
			surf.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
		}
		return surf;
	}

	Correspondence build_correspondence(const SurfaceMesh &surf, const TetMesh &tm)
	{
		if (surf.vertices.empty() || tm.boundary_nodes.empty())
			throw EmptyMesh("correspondence needs a nonempty surface and tet boundary");

		std::vector<Vec3> boundary(tm.boundary_nodes.size());
		for (std::size_t k = 0; k < boundary.size(); ++k)
			boundary[k] = tm.nodes[tm.boundary_nodes[k]];

		const auto surf_n = normalize_to_unit_box(surf.vertices, bounding_box(surf.vertices));
		const auto tet_n = normalize_to_unit_box(boundary, bounding_box(boundary));

		Correspondence corr;
		corr.num_tet_nodes = tm.nodes.size();
		corr.surf_to_tet.resize(surf_n.size());
		corr.tet_to_surf.resize(tet_n.size());

		const KdTree tet_tree(tet_n);
		double max_d2 = 0.0;
		for (std::size_t i = 0; i < surf_n.size(); ++i)
		{
			const auto hit = tet_tree.nearest(surf_n[i]);
			corr.surf_to_tet[i] = tm.boundary_nodes[hit.index];
			max_d2 = std::max(max_d2, hit.distance2);
		}
		const KdTree surf_tree(surf_n);
		for (std::size_t k = 0; k < tet_n.size(); ++k)
			corr.tet_to_surf[k] = surf_tree.nearest(tet_n[k]).index;
		corr.max_match_distance = std::sqrt(max_d2);
		return corr;
	}
} // namespace dropstyle
