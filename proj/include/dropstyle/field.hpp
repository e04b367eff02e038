#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace dropstyle
{
	/// Per-vertex (or per-element) scalar field. The tag keeps displacement,
	/// mask, stress and thickness values from being mixed up at call sites.
	template <typename Tag>
	struct ScalarField
	{
		std::vector<double> values;

		ScalarField() = default;
		explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}
		ScalarField(std::size_t n, double fill) : values(n, fill) {}

		std::size_t size() const { return values.size(); }
		bool empty() const { return values.empty(); }
		double &operator[](std::size_t i) { return values[i]; }
		double operator[](std::size_t i) const { return values[i]; }
		std::span<const double> view() const { return values; }

		auto begin() const { return values.begin(); }
		auto end() const { return values.end(); }

		friend bool operator==(const ScalarField &, const ScalarField &) = default;
	};

	using DisplacementField = ScalarField<struct DisplacementTag>;
	using MaskField = ScalarField<struct MaskTag>;
	using NormalizedStress = ScalarField<struct NormalizedStressTag>;
	using ThicknessField = ScalarField<struct ThicknessTag>;
} // namespace dropstyle
