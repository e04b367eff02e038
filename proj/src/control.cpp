#include <dropstyle/control.hpp>
#include <dropstyle/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dropstyle
{
	std::string to_string(ControlStrategy s)
	{
		switch (s)
		{
		case ControlStrategy::none: return "none";
		case ControlStrategy::linear: return "linear";
		case ControlStrategy::exponential: return "exponential";
		case ControlStrategy::frozen: return "frozen";
		}
		return "?";
	}

	ControlStrategy parse_control_strategy(const std::string &name)
	{
		std::string n = name;
		std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
		if (n == "none")
			return ControlStrategy::none;
		if (n == "linear")
			return ControlStrategy::linear;
		if (n == "exponential")
			return ControlStrategy::exponential;
		if (n == "frozen")
			return ControlStrategy::frozen;
		throw ConfigError("unknown control strategy '" + name + "'");
	}

	void ControlConfig::validate() const
	{
		if (strategy == ControlStrategy::frozen && !(frozen_threshold > 0.0))
			throw DomainError("frozen control needs a positive threshold");
	}

	double mask_linear(double s) { return std::max(0.0, 1.0 - s); }

	double mask_exponential(double s)
	{
		if (s >= 1.0)
			return 0.0;
		return std::exp(-s / (1.0 - s));
	}

	MaskField mask_linear(const NormalizedStress &sn)
	{
		MaskField m(sn.size(), 0.0);
		for (std::size_t v = 0; v < sn.size(); ++v)
			m[v] = mask_linear(sn[v]);
		return m;
	}

	MaskField mask_exponential(const NormalizedStress &sn)
	{
		MaskField m(sn.size(), 0.0);
		for (std::size_t v = 0; v < sn.size(); ++v)
			m[v] = mask_exponential(sn[v]);
		return m;
	}

	MaskField mask_frozen(std::span<const double> vertex_vm, double threshold)
	{
		if (!(threshold > 0.0))
			throw DomainError("frozen threshold must be > 0");
		MaskField m(vertex_vm.size(), 1.0);
		for (std::size_t v = 0; v < vertex_vm.size(); ++v)
			if (vertex_vm[v] >= threshold)
				m[v] = 0.0;
		return m;
	}

	MaskField compute_mask(const ControlConfig &cfg, const NormalizedStress &sn, std::span<const double> vertex_vm)
	{
		switch (cfg.strategy)
		{
		case ControlStrategy::linear: return mask_linear(sn);
		case ControlStrategy::exponential: return mask_exponential(sn);
		case ControlStrategy::frozen: return mask_frozen(vertex_vm, cfg.frozen_threshold);
		case ControlStrategy::none: break;
		}
		return MaskField(sn.size(), 1.0);
	}

	DisplacementField apply_mask(const DisplacementField &d, const MaskField &m)
	{
		if (d.size() != m.size())
			throw LengthMismatch("displacement has " + std::to_string(d.size()) + " entries, mask " + std::to_string(m.size()));
		DisplacementField out(d.size(), 0.0);
		for (std::size_t v = 0; v < d.size(); ++v)
			out[v] = d[v] * m[v];
		return out;
	}
} // namespace dropstyle
