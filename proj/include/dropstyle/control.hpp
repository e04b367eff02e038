#pragma once

#include <dropstyle/field.hpp>

#include <span>
#include <string>

namespace dropstyle
{
	enum class ControlStrategy
	{
		none,
		linear,
		exponential,
		frozen
	};

	std::string to_string(ControlStrategy s);
	ControlStrategy parse_control_strategy(const std::string &name); ///< ConfigError on unknown names

	struct ControlConfig
	{
		ControlStrategy strategy = ControlStrategy::exponential;
		double frozen_threshold = 0.0; ///< Pa, max vertex stress of the unstyled model; set by the pipeline

		void validate() const;
	};

	/// max(0, 1 - s)
	MaskField mask_linear(const NormalizedStress &sn);
	/// exp(-s / (1 - s)) for s < 1, otherwise 0
	MaskField mask_exponential(const NormalizedStress &sn);
	/// 0 where the raw stress reaches the threshold, otherwise 1
	MaskField mask_frozen(std::span<const double> vertex_vm, double threshold);

	double mask_linear(double s);
	double mask_exponential(double s);

	/// Dispatch on the configured strategy. `none` yields an all-ones mask.
	MaskField compute_mask(const ControlConfig &cfg, const NormalizedStress &sn, std::span<const double> vertex_vm);

	DisplacementField apply_mask(const DisplacementField &d, const MaskField &m);
} // namespace dropstyle
