#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace dropstyle
{
	using Vec3 = Eigen::Vector3d;
	using Mat3 = Eigen::Matrix3d;
	using Face = std::array<int, 3>;

	struct BBox
	{
		Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
		Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

		void extend(const Vec3 &p)
		{
			min = min.cwiseMin(p);
			max = max.cwiseMax(p);
		}
		bool valid() const { return (min.array() <= max.array()).all(); }
		Vec3 extent() const { return max - min; }
		double diagonal() const { return valid() ? extent().norm() : 0.0; }
	};

	BBox bounding_box(std::span<const Vec3> points);

	/// Maps points into [0,1]^3 using the per-axis extent of `box`. Axes with
	/// zero extent collapse to 0.
	std::vector<Vec3> normalize_to_unit_box(std::span<const Vec3> points, const BBox &box);

	Vec3 closest_point_on_triangle(const Vec3 &p, const Vec3 &a, const Vec3 &b, const Vec3 &c);

	/// Static 3-d tree over a point set; nearest-neighbour queries only.
	class KdTree
	{
	public:
		KdTree() = default;
		explicit KdTree(std::span<const Vec3> points);

		struct Hit
		{
			int index = -1;
			double distance2 = std::numeric_limits<double>::infinity();
		};

		/// Nearest point; ties resolve to the lowest index.
		Hit nearest(const Vec3 &q) const;

		std::size_t size() const { return points_.size(); }

	private:
		struct Node
		{
			int begin, end; // range in order_
			int left = -1, right = -1;
			int axis = 0;
			double split = 0.0;
		};

		int build(int begin, int end, int depth);
		void search(int node, const Vec3 &q, Hit &best) const;

		std::vector<Vec3> points_;
		std::vector<int> order_;
		std::vector<Node> nodes_;
	};

	/// Bounding-volume hierarchy over a triangle soup: closest-point and ray queries.
	class TriangleBvh
	{
	public:
		TriangleBvh() = default;
		TriangleBvh(std::span<const Vec3> vertices, std::span<const Face> faces);

		struct PointHit
		{
			int face = -1;
			Vec3 point = Vec3::Zero();
			double distance2 = std::numeric_limits<double>::infinity();
		};

		/// Closest surface point within sqrt(max_distance2), if any.
		PointHit closest_point(const Vec3 &p, double max_distance2 = std::numeric_limits<double>::infinity()) const;

		/// Smallest ray parameter t > t_min hitting a triangle, if any.
		std::optional<double> first_hit(const Vec3 &origin, const Vec3 &dir, double t_min) const;

	private:
		struct Node
		{
			BBox box;
			int left = -1, right = -1;
			int begin = 0, end = 0;
		};

		int build(int begin, int end);
		void closest(int node, const Vec3 &p, PointHit &best) const;
		void raycast(int node, const Vec3 &o, const Vec3 &d, double t_min, double &best) const;

		std::vector<Vec3> vertices_;
		std::vector<Face> faces_;
		std::vector<int> order_;
		std::vector<Vec3> centroids_;
		std::vector<Node> nodes_;
	};
} // namespace dropstyle
