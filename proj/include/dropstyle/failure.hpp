#pragma once

#include <dropstyle/field.hpp>
#include <dropstyle/material.hpp>

#include <span>

namespace dropstyle
{
	/// sigma_c = safety_lambda * yield. safety_lambda is the safety factor,
	/// unrelated to the Lame lambda.
	struct FailureCriterion
	{
		Material material;
		double safety_lambda = 0.2;
		double sigma_c = 0.0;

		static FailureCriterion make(const Material &mat, double safety_lambda = 0.2);
	};

	/// Throws DomainError unless 0 < safety_lambda <= 1.
	double critical_stress(const Material &mat, double safety_lambda);

	NormalizedStress normalized_stress(std::span<const double> vertex_vm, double sigma_c);

	enum class Viability
	{
		viable,
		broken
	};

	const char *to_string(Viability v);

	struct Verdict
	{
		Viability viability = Viability::viable;
		double max_stress = 0.0; ///< Pa
		int worst_vertex = 0;    ///< lowest index among ties
	};

	/// Broken iff the max vertex stress reaches the yield strength (>=).
	Verdict viability_verdict(std::span<const double> vertex_vm, const Material &mat);
} // namespace dropstyle
