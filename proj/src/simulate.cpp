#include <dropstyle/errors.hpp>
#include <dropstyle/simulate.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dropstyle
{
	namespace
	{
		constexpr double standard_gravity = 9.81;
		// Cauchy stress divides by J; inverted or crushed elements are reported
		// as if J had this floor.
		constexpr double min_reported_j = 1e-3;

		inline Mat3 cofactor(const Mat3 &F)
		{
			Mat3 c;
			c.col(0) = F.col(1).cross(F.col(2));
			c.col(1) = F.col(2).cross(F.col(0));
			c.col(2) = F.col(0).cross(F.col(1));
			return c;
		}

		// von Mises of mu/J * B + p I depends only on the deviator of B = F F^T.
		inline double von_mises_from_left_cauchy_green(const Mat3 &F, double mu)
		{
			const double j = F.determinant();
			const double b00 = F.row(0).squaredNorm(), b11 = F.row(1).squaredNorm(), b22 = F.row(2).squaredNorm();
			const double b01 = F.row(0).dot(F.row(1)), b02 = F.row(0).dot(F.row(2)), b12 = F.row(1).dot(F.row(2));
			const double m = (b00 + b11 + b22) / 3.0;
			const double ss = (b00 - m) * (b00 - m) + (b11 - m) * (b11 - m) + (b22 - m) * (b22 - m) + 2.0 * (b01 * b01 + b02 * b02 + b12 * b12);
			return mu / std::max(j, min_reported_j) * std::sqrt(1.5 * ss);
		}
	} // namespace

	void SimConfig::validate() const
	{
		if (!(drop_height >= 0.0) || !(gravity >= 0.0))
			throw DomainError("drop height and gravity must be nonnegative");
		if (!(dt >= 0.0) || !(dt_safety > 0.0 && dt_safety <= 1.0))
			throw DomainError("dt must be >= 0 (0 = auto) and dt_safety in (0, 1]");
		if (!(duration > 0.0))
			throw DomainError("simulation duration must be positive");
		if (!(contact_depth > 0.0))
			throw DomainError("contact depth must be positive");
		if (!(damping >= 0.0) || !(start_gap >= 0.0))
			throw DomainError("damping and start gap must be nonnegative");
		if (substeps < 1 || threads < 1)
			throw DomainError("substeps and threads must be >= 1");
		if (!(up.norm() > 0.0))
			throw DomainError("up vector must be nonzero");
	}

	double SimConfig::contact_stiffness_per_mass() const { return standard_gravity / contact_depth; }

	double impact_velocity(double drop_height, double gravity)
	{
		if (drop_height < 0.0 || gravity < 0.0)
			throw DomainError("impact velocity needs h >= 0 and g >= 0");
		return std::sqrt(2.0 * gravity * drop_height);
	}

	double stability_bound(const TetMesh &tm, const Material &mat)
	{
		return 0.5 * characteristic_length(tm) * std::sqrt(mat.density / (mat.lame_lambda + 2.0 * mat.lame_mu));
	}

	double NeoHookean::energy_density(const Mat3 &F) const
	{
		const double ic = F.squaredNorm();
		const double j = F.determinant();
		return 0.5 * mu * (ic - 3.0) - mu * (j - 1.0) + 0.5 * lambda_hat * (j - 1.0) * (j - 1.0);
	}

	Mat3 NeoHookean::first_piola(const Mat3 &F) const
	{
		const double j = F.determinant();
		return mu * F + (lambda_hat * (j - 1.0) - mu) * cofactor(F);
	}

	Mat3 NeoHookean::cauchy(const Mat3 &F) const
	{
		const double j = F.determinant();
		return first_piola(F) * F.transpose() / std::max(j, min_reported_j);
	}

	double element_von_mises(const Mat3 &s)
	{
		const double scale = s.cwiseAbs().maxCoeff();
		if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
			throw AsymmetryError("stress tensor is not symmetric");
		const Mat3 dev = s - (s.trace() / 3.0) * Mat3::Identity();
		return std::sqrt(1.5 * dev.squaredNorm());
	}

	// ------------------------------------------------------------ simulator

	DropSimulator::DropSimulator(const TetMesh &tm, const Material &mat, const SimConfig &cfg)
		: tm_(tm), mat_(mat), cfg_(cfg), model_(mat)
	{
		cfg_.validate();
		cfg_.up.normalize();
		if (tm.tets.empty())
			throw ResolutionError("cannot simulate an empty tet mesh");

		const double bound = stability_bound(tm, mat);
		if (cfg_.dt > 0.0)
		{
			if (cfg_.dt > bound)
				throw StabilityBoundError("dt " + std::to_string(cfg_.dt) + " s exceeds the stability bound " + std::to_string(bound) + " s");
			dt_ = cfg_.dt;
		}
		contact_k_ = cfg_.contact_stiffness_per_mass();
		if (cfg_.dt <= 0.0)
		{
			// a very stiff plane can be the faster oscillator
			const double contact_bound = cfg_.ground_contact ? 1.0 / std::sqrt(contact_k_) : bound;
			dt_ = cfg_.dt_safety * std::min(bound, contact_bound);
		}

		const std::size_t n = tm.nodes.size(), m = tm.tets.size();
		mass_.assign(n, 0.0);
		dm_inv_.resize(m);
		rest_volume_.resize(m);
		for (std::size_t t = 0; t < m; ++t)
		{
			const Tet &tet = tm.tets[t];
			Mat3 dm;
			for (int k = 0; k < 3; ++k)
				dm.col(k) = tm.nodes[tet[k + 1]] - tm.nodes[tet[0]];
			rest_volume_[t] = dm.determinant() / 6.0;
			dm_inv_[t] = dm.inverse();
			for (int v : tet)
				mass_[v] += 0.25 * mat.density * rest_volume_[t];
		}

		incident_offsets_.assign(n + 1, 0);
		for (const Tet &tet : tm.tets)
			for (int v : tet)
				++incident_offsets_[v + 1];
		for (std::size_t i = 0; i < n; ++i)
			incident_offsets_[i + 1] += incident_offsets_[i];
		incident_.resize(incident_offsets_[n]);
		std::vector<int> fill(incident_offsets_.begin(), incident_offsets_.end() - 1);
		for (std::size_t t = 0; t < m; ++t)
			for (int k = 0; k < 4; ++k)
				incident_[fill[tm.tets[t][k]]++] = static_cast<int>(t * 4 + k);

		tet_forces_.resize(m);
		force_.resize(n);
		max_vm_.assign(m, 0.0);
		if (cfg_.threads > 1)
			pool_ = std::make_unique<WorkerPool>(cfg_.threads);

		reset_drop_state();
		if (cfg_.trace_path)
			write_trace_header();
	}

	DropSimulator::~DropSimulator() = default;

	void DropSimulator::reset_drop_state()
	{
		x_ = tm_.nodes;
		double lowest = std::numeric_limits<double>::infinity();
		for (const Vec3 &p : x_)
			lowest = std::min(lowest, p.dot(cfg_.up));
		plane_ = lowest - cfg_.start_gap;
		const double speed = impact_velocity(cfg_.drop_height, cfg_.gravity);
		v_.assign(x_.size(), -speed * cfg_.up);
		time_ = 0.0;
		steps_ = 0;
		std::fill(max_vm_.begin(), max_vm_.end(), 0.0);
	}

	std::size_t DropSimulator::total_steps() const
	{
		const double v0 = impact_velocity(cfg_.drop_height, cfg_.gravity);
		const double g = cfg_.gravity, gap = cfg_.start_gap;
		double fall = 0.0;
		if (gap > 0.0 && (v0 > 0.0 || g > 0.0))
			fall = g > 0.0 ? (-v0 + std::sqrt(v0 * v0 + 2.0 * g * gap)) / g : gap / v0;
		return static_cast<std::size_t>(std::ceil((cfg_.duration + fall) / dt_));
	}

	void DropSimulator::element_forces(std::size_t begin, std::size_t end, bool track_stress)
	{
		const double mu = model_.mu, lam = model_.lambda_hat;
		for (std::size_t t = begin; t < end; ++t)
		{
			const Tet &tet = tm_.tets[t];
			const Vec3 &x0 = x_[tet[0]];
			Mat3 ds;
			ds.col(0) = x_[tet[1]] - x0;
			ds.col(1) = x_[tet[2]] - x0;
			ds.col(2) = x_[tet[3]] - x0;
			const Mat3 F = ds * dm_inv_[t];
			const Mat3 cof = cofactor(F);
			const double j = F.col(0).dot(cof.col(0));
			const Mat3 P = mu * F + (lam * (j - 1.0) - mu) * cof;
			const Mat3 H = -rest_volume_[t] * P * dm_inv_[t].transpose();
			auto &f = tet_forces_[t];
			f[1] = H.col(0);
			f[2] = H.col(1);
			f[3] = H.col(2);
			f[0] = -(f[1] + f[2] + f[3]);
			if (track_stress)
				max_vm_[t] = std::max(max_vm_[t], von_mises_from_left_cauchy_green(F, mu));
		}
	}

	void DropSimulator::step()
	{
		const std::size_t m = tm_.tets.size(), n = x_.size();
		auto forces = [&](std::size_t b, std::size_t e) { element_forces(b, e, true); };
		if (pool_)
			pool_->parallel_for(m, forces);
		else
			forces(0, m);

		const Vec3 up = cfg_.up;
		const Vec3 gvec = -cfg_.gravity * up;
		const double c = cfg_.damping, dt = dt_;
		auto integrate = [&](std::size_t b, std::size_t e) {
			for (std::size_t i = b; i < e; ++i)
			{
				Vec3 f = Vec3::Zero();
				for (int k = incident_offsets_[i]; k < incident_offsets_[i + 1]; ++k)
				{
					const int code = incident_[k];
					f += tet_forces_[code >> 2][code & 3];
				}
				Vec3 a = f / mass_[i] + gvec - c * v_[i];
				if (cfg_.ground_contact)
				{
					const double pen = plane_ - x_[i].dot(up);
					if (pen > 0.0)
						a += contact_k_ * pen * up;
				}
				v_[i] += dt * a;
				x_[i] += dt * v_[i];
			}
		};
		if (pool_)
			pool_->parallel_for(n, integrate);
		else
			integrate(0, n);

		time_ += dt_;
		++steps_;

		if (steps_ % 64 == 0)
		{
			for (std::size_t i = 0; i < n; ++i)
				if (!x_[i].allFinite())
					throw InstabilityError("node " + std::to_string(i) + " left the finite range at step " + std::to_string(steps_) + " (t = " + std::to_string(time_) + " s, dt = " + std::to_string(dt_) + " s)");
		}
		if (trace_.is_open() && steps_ % cfg_.substeps == 0)
			write_trace_frame();
	}

	void DropSimulator::run()
	{
		const std::size_t total = total_steps();
		while (static_cast<std::size_t>(steps_) < total)
			step();
		for (std::size_t i = 0; i < x_.size(); ++i)
			if (!x_[i].allFinite())
				throw InstabilityError("node " + std::to_string(i) + " is non-finite at the end of the run");
		// the last step's positions have not been stress-checked yet
		const auto last = current_von_mises();
		for (std::size_t t = 0; t < last.size(); ++t)
			max_vm_[t] = std::max(max_vm_[t], last[t]);
	}

	std::vector<Vec3> DropSimulator::internal_forces() const
	{
		auto *self = const_cast<DropSimulator *>(this);
		self->element_forces(0, tm_.tets.size(), false);
		std::vector<Vec3> f(x_.size(), Vec3::Zero());
		for (std::size_t i = 0; i < x_.size(); ++i)
			for (int k = incident_offsets_[i]; k < incident_offsets_[i + 1]; ++k)
				f[i] += tet_forces_[incident_[k] >> 2][incident_[k] & 3];
		return f;
	}

	std::vector<double> DropSimulator::current_von_mises() const
	{
		std::vector<double> vm(tm_.tets.size());
		for (std::size_t t = 0; t < vm.size(); ++t)
		{
			const Tet &tet = tm_.tets[t];
			Mat3 ds;
			for (int k = 0; k < 3; ++k)
				ds.col(k) = x_[tet[k + 1]] - x_[tet[0]];
			vm[t] = von_mises_from_left_cauchy_green(ds * dm_inv_[t], model_.mu);
		}
		return vm;
	}

	double DropSimulator::kinetic_energy() const
	{
		// stored velocities lag the positions by half a step; bring them level
		const std::vector<Vec3> f = internal_forces();
		const Vec3 up = cfg_.up;
		double e = 0.0;
		for (std::size_t i = 0; i < x_.size(); ++i)
		{
			Vec3 a = f[i] / mass_[i] - cfg_.gravity * up - cfg_.damping * v_[i];
			if (cfg_.ground_contact)
			{
				const double pen = plane_ - x_[i].dot(up);
				if (pen > 0.0)
					a += contact_k_ * pen * up;
			}
			e += 0.5 * mass_[i] * (v_[i] + 0.5 * dt_ * a).squaredNorm();
		}
		return e;
	}

	double DropSimulator::elastic_energy() const
	{
		double e = 0.0;
		for (std::size_t t = 0; t < tm_.tets.size(); ++t)
		{
			const Tet &tet = tm_.tets[t];
			Mat3 ds;
			for (int k = 0; k < 3; ++k)
				ds.col(k) = x_[tet[k + 1]] - x_[tet[0]];
			e += rest_volume_[t] * model_.energy_density(ds * dm_inv_[t]);
		}
		return e;
	}

	double DropSimulator::gravity_energy() const
	{
		double e = 0.0;
		for (std::size_t i = 0; i < x_.size(); ++i)
			e += mass_[i] * cfg_.gravity * (x_[i].dot(cfg_.up) - plane_);
		return e;
	}

	double DropSimulator::contact_energy() const
	{
		if (!cfg_.ground_contact)
			return 0.0;
		double e = 0.0;
		for (std::size_t i = 0; i < x_.size(); ++i)
		{
			const double pen = plane_ - x_[i].dot(cfg_.up);
			if (pen > 0.0)
				e += 0.5 * mass_[i] * contact_k_ * pen * pen;
		}
		return e;
	}

	// Trace layout (little endian):
	//   char[8] "DSTRACE\0", u32 version = 1, u32 element count, f64 dt, u32 steps per frame
	//   then frames until EOF: f64 time, f32 von Mises per element (Pa)
	void DropSimulator::write_trace_header()
	{
		trace_.open(*cfg_.trace_path, std::ios::binary);
		if (!trace_)
			throw IoError("cannot open trace file '" + cfg_.trace_path->string() + "'");
		const char magic[8] = {'D', 'S', 'T', 'R', 'A', 'C', 'E', '\0'};
		trace_.write(magic, 8);
		const std::uint32_t version = 1, count = static_cast<std::uint32_t>(tm_.tets.size()), per = static_cast<std::uint32_t>(cfg_.substeps);
		trace_.write(reinterpret_cast<const char *>(&version), 4);
		trace_.write(reinterpret_cast<const char *>(&count), 4);
		trace_.write(reinterpret_cast<const char *>(&dt_), 8);
		trace_.write(reinterpret_cast<const char *>(&per), 4);
	}

	void DropSimulator::write_trace_frame()
	{
		trace_.write(reinterpret_cast<const char *>(&time_), 8);
		for (double v : current_von_mises())
		{
			const float f = static_cast<float>(v);
			trace_.write(reinterpret_cast<const char *>(&f), 4);
		}
	}

	StressField drop_test(const TetMesh &tm, const Material &mat, const SimConfig &cfg)
	{
		DropSimulator sim(tm, mat, cfg);
		sim.run();
		spdlog::debug("drop test: {} tets, {} steps of {:.3g} s", tm.tets.size(), sim.steps_taken(), sim.dt());
		StressField sf;
		sf.per_element_max_vm = sim.max_von_mises();
		return sf;
	}

	std::vector<double> element_to_vertex_stress(const StressField &sf, const TetMesh &tm, const Correspondence &corr)
	{
		if (corr.num_tet_nodes != tm.nodes.size() || corr.tet_to_surf.size() != tm.boundary_nodes.size())
			throw StaleCorrespondence("correspondence was built for a different tet mesh");
		if (sf.per_element_max_vm.size() != tm.tets.size())
			throw StaleCorrespondence("stress field has " + std::to_string(sf.per_element_max_vm.size()) + " elements, mesh has " + std::to_string(tm.tets.size()));
		std::vector<double> node(tm.nodes.size(), 0.0);
		for (std::size_t t = 0; t < tm.tets.size(); ++t)
			for (int v : tm.tets[t])
				node[v] = std::max(node[v], sf.per_element_max_vm[t]);
		std::vector<double> out(corr.surf_to_tet.size());
		for (std::size_t i = 0; i < out.size(); ++i)
		{
			const int n = corr.surf_to_tet[i];
			if (n < 0 || n >= static_cast<int>(node.size()))
				throw StaleCorrespondence("surface vertex " + std::to_string(i) + " maps outside the tet mesh");
			out[i] = node[n];
		}
		return out;
	}
} // namespace dropstyle
