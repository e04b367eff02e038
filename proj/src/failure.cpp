#include <dropstyle/errors.hpp>
#include <dropstyle/failure.hpp>

#include <cmath>

namespace dropstyle
{
	double critical_stress(const Material &mat, double safety_lambda)
	{
		if (!(safety_lambda > 0.0 && safety_lambda <= 1.0))
			throw DomainError("safety lambda must lie in (0, 1], got " + std::to_string(safety_lambda));
		return safety_lambda * mat.yield_strength;
	}

	FailureCriterion FailureCriterion::make(const Material &mat, double safety_lambda)
	{
		return {mat, safety_lambda, critical_stress(mat, safety_lambda)};
	}

	NormalizedStress normalized_stress(std::span<const double> vertex_vm, double sigma_c)
	{
		if (!(sigma_c > 0.0))
			throw DomainError("critical stress must be positive");
		NormalizedStress out(vertex_vm.size(), 0.0);
		for (std::size_t i = 0; i < vertex_vm.size(); ++i)
			out[i] = vertex_vm[i] / sigma_c;
		return out;
	}

	const char *to_string(Viability v) { return v == Viability::viable ? "viable" : "broken"; }

	Verdict viability_verdict(std::span<const double> vertex_vm, const Material &mat)
	{
		if (vertex_vm.empty())
			throw EmptyMesh("verdict needs at least one vertex stress");
		Verdict v;
		v.max_stress = vertex_vm[0];
		for (std::size_t i = 1; i < vertex_vm.size(); ++i)
			if (vertex_vm[i] > v.max_stress)
			{
				v.max_stress = vertex_vm[i];
				v.worst_vertex = static_cast<int>(i);
			}
		v.viability = v.max_stress >= mat.yield_strength ? Viability::broken : Viability::viable;
		return v;
	}
} // namespace dropstyle
