#include <dropstyle/geometry.hpp>

#include <algorithm>
#include <numeric>

namespace dropstyle
{
	BBox bounding_box(std::span<const Vec3> points)
	{
		BBox box;
		for (const Vec3 &p : points)
			box.extend(p);
		return box;
	}

	std::vector<Vec3> normalize_to_unit_box(std::span<const Vec3> points, const BBox &box)
	{
		const Vec3 ext = box.extent();
		std::vector<Vec3> out(points.size());
		for (std::size_t i = 0; i < points.size(); ++i)
			for (int a = 0; a < 3; ++a)
				out[i][a] = ext[a] > 0.0 ? (points[i][a] - box.min[a]) / ext[a] : 0.0;
		return out;
	}

	// Ericson, Real-Time Collision Detection, 5.1.5
	Vec3 closest_point_on_triangle(const Vec3 &p, const Vec3 &a, const Vec3 &b, const Vec3 &c)
	{
		const Vec3 ab = b - a, ac = c - a, ap = p - a;
		const double d1 = ab.dot(ap), d2 = ac.dot(ap);
		if (d1 <= 0.0 && d2 <= 0.0)
			return a;

		const Vec3 bp = p - b;
		const double d3 = ab.dot(bp), d4 = ac.dot(bp);
		if (d3 >= 0.0 && d4 <= d3)
			return b;

		const double vc = d1 * d4 - d3 * d2;
		if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0)
			return a + ab * (d1 / (d1 - d3));

		const Vec3 cp = p - c;
		const double d5 = ab.dot(cp), d6 = ac.dot(cp);
		if (d6 >= 0.0 && d5 <= d6)
			return c;

		const double vb = d5 * d2 - d1 * d6;
		if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0)
			return a + ac * (d2 / (d2 - d6));

		const double va = d3 * d6 - d5 * d4;
		if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
			return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

		const double denom = 1.0 / (va + vb + vc);
		return a + ab * (vb * denom) + ac * (vc * denom);
	}

	// ---------------------------------------------------------------- KdTree

	KdTree::KdTree(std::span<const Vec3> points)
		: points_(points.begin(), points.end()), order_(points.size())
	{
		std::iota(order_.begin(), order_.end(), 0);
		if (!points_.empty())
			build(0, static_cast<int>(order_.size()), 0);
	}

	int KdTree::build(int begin, int end, int depth)
	{
		const int id = static_cast<int>(nodes_.size());
		nodes_.push_back({begin, end});
		if (end - begin <= 8)
			return id;

		BBox box;
		for (int i = begin; i < end; ++i)
			box.extend(points_[order_[i]]);
		int axis;
		box.extent().maxCoeff(&axis);

		const int mid = (begin + end) / 2;
		std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
						 [&](int a, int b) {
							 const double pa = points_[a][axis], pb = points_[b][axis];
							 return pa < pb || (pa == pb && a < b);
						 });
		const double split = points_[order_[mid]][axis];
		const int left = build(begin, mid, depth + 1);
		const int right = build(mid, end, depth + 1);
		nodes_[id].axis = axis;
		nodes_[id].split = split;
		nodes_[id].left = left;
		nodes_[id].right = right;
		return id;
	}

	KdTree::Hit KdTree::nearest(const Vec3 &q) const
	{
		Hit best;
		if (!nodes_.empty())
			search(0, q, best);
		return best;
	}

	void KdTree::search(int node_id, const Vec3 &q, Hit &best) const
	{
		const Node &node = nodes_[node_id];
		if (node.left < 0)
		{
			for (int i = node.begin; i < node.end; ++i)
			{
				const int idx = order_[i];
				const double d2 = (points_[idx] - q).squaredNorm();
				if (d2 < best.distance2 || (d2 == best.distance2 && idx < best.index))
					best = {idx, d2};
			}
			return;
		}
		const double delta = q[node.axis] - node.split;
		const int first = delta < 0.0 ? node.left : node.right;
		const int second = delta < 0.0 ? node.right : node.left;
		search(first, q, best);
		// <= keeps equal-distance candidates on the far side reachable for the index tie rule
		if (delta * delta <= best.distance2)
			search(second, q, best);
	}

	// ----------------------------------------------------------- TriangleBvh

	namespace
	{
		double box_distance2(const BBox &box, const Vec3 &p)
		{
			const Vec3 d = (box.min - p).cwiseMax(p - box.max).cwiseMax(Vec3::Zero());
			return d.squaredNorm();
		}

		bool ray_box(const BBox &box, const Vec3 &o, const Vec3 &inv_d, double t_max)
		{
			double t0 = 0.0, t1 = t_max;
			for (int a = 0; a < 3; ++a)
			{
				double ta = (box.min[a] - o[a]) * inv_d[a];
				double tb = (box.max[a] - o[a]) * inv_d[a];
				if (ta > tb)
					std::swap(ta, tb);
				t0 = std::max(t0, ta);
				t1 = std::min(t1, tb);
				if (t0 > t1)
					return false;
			}
			return true;
		}

		// Moller-Trumbore; returns ray parameter or a negative value on miss.
		double ray_triangle(const Vec3 &o, const Vec3 &d, const Vec3 &a, const Vec3 &b, const Vec3 &c)
		{
			const Vec3 e1 = b - a, e2 = c - a;
			const Vec3 pv = d.cross(e2);
			const double det = e1.dot(pv);
			if (std::abs(det) < 1e-300)
				return -1.0;
			const double inv = 1.0 / det;
			const Vec3 tv = o - a;
			const double u = tv.dot(pv) * inv;
			if (u < 0.0 || u > 1.0)
				return -1.0;
			const Vec3 qv = tv.cross(e1);
			const double v = d.dot(qv) * inv;
			if (v < 0.0 || u + v > 1.0)
				return -1.0;
			return e2.dot(qv) * inv;
		}
	} // namespace

	TriangleBvh::TriangleBvh(std::span<const Vec3> vertices, std::span<const Face> faces)
		: vertices_(vertices.begin(), vertices.end()), faces_(faces.begin(), faces.end()), order_(faces.size()), centroids_(faces.size())
	{
		std::iota(order_.begin(), order_.end(), 0);
		for (std::size_t f = 0; f < faces_.size(); ++f)
			centroids_[f] = (vertices_[faces_[f][0]] + vertices_[faces_[f][1]] + vertices_[faces_[f][2]]) / 3.0;
		if (!faces_.empty())
			build(0, static_cast<int>(faces_.size()));
	}

	int TriangleBvh::build(int begin, int end)
	{
		const int id = static_cast<int>(nodes_.size());
		nodes_.push_back({});
		BBox box, cbox;
		for (int i = begin; i < end; ++i)
		{
			const Face &f = faces_[order_[i]];
			for (int k = 0; k < 3; ++k)
				box.extend(vertices_[f[k]]);
			cbox.extend(centroids_[order_[i]]);
		}
		nodes_[id].box = box;
		nodes_[id].begin = begin;
		nodes_[id].end = end;
		if (end - begin <= 4)
			return id;

		int axis;
		cbox.extent().maxCoeff(&axis);
		const int mid = (begin + end) / 2;
		std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
						 [&](int a, int b) {
							 const double ca = centroids_[a][axis], cb = centroids_[b][axis];
							 return ca < cb || (ca == cb && a < b);
						 });
		const int left = build(begin, mid);
		const int right = build(mid, end);
		nodes_[id].left = left;
		nodes_[id].right = right;
		return id;
	}

	TriangleBvh::PointHit TriangleBvh::closest_point(const Vec3 &p, double max_distance2) const
	{
		PointHit best;
		best.distance2 = max_distance2;
		if (!nodes_.empty())
			closest(0, p, best);
		if (best.face < 0)
			best.distance2 = std::numeric_limits<double>::infinity();
		return best;
	}

	void TriangleBvh::closest(int node_id, const Vec3 &p, PointHit &best) const
	{
		const Node &node = nodes_[node_id];
		if (box_distance2(node.box, p) > best.distance2)
			return;
		if (node.left < 0)
		{
			for (int i = node.begin; i < node.end; ++i)
			{
				const Face &f = faces_[order_[i]];
				const Vec3 q = closest_point_on_triangle(p, vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
				const double d2 = (q - p).squaredNorm();
				if (d2 < best.distance2 || (d2 == best.distance2 && order_[i] < best.face))
					best = {order_[i], q, d2};
			}
			return;
		}
		const double dl = box_distance2(nodes_[node.left].box, p);
		const double dr = box_distance2(nodes_[node.right].box, p);
		if (dl <= dr)
		{
			closest(node.left, p, best);
			closest(node.right, p, best);
		}
		else
		{
			closest(node.right, p, best);
			closest(node.left, p, best);
		}
	}

	std::optional<double> TriangleBvh::first_hit(const Vec3 &origin, const Vec3 &dir, double t_min) const
	{
		double best = std::numeric_limits<double>::infinity();
		if (!nodes_.empty())
			raycast(0, origin, dir, t_min, best);
		if (std::isinf(best))
			return std::nullopt;
		return best;
	}

	void TriangleBvh::raycast(int node_id, const Vec3 &o, const Vec3 &d, double t_min, double &best) const
	{
		const Node &node = nodes_[node_id];
		const Vec3 inv_d = d.cwiseInverse();
		if (!ray_box(node.box, o, inv_d, best))
			return;
		if (node.left < 0)
		{
			for (int i = node.begin; i < node.end; ++i)
			{
				const Face &f = faces_[order_[i]];
				const double t = ray_triangle(o, d, vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
				if (t > t_min && t < best)
					best = t;
			}
			return;
		}
		raycast(node.left, o, d, t_min, best);
		raycast(node.right, o, d, t_min, best);
	}
} // namespace dropstyle
