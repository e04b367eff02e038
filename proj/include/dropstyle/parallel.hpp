#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dropstyle
{
	/// Fixed-size worker pool for data-parallel loops. Ranges are split into
	/// contiguous chunks, one per worker, so results never depend on timing.
	class WorkerPool
	{
	public:
		explicit WorkerPool(int threads);
		~WorkerPool();

		WorkerPool(const WorkerPool &) = delete;
		WorkerPool &operator=(const WorkerPool &) = delete;

		int size() const { return static_cast<int>(workers_.size()) + 1; }

		/// Calls fn(begin, end) over a partition of [0, n); blocks until done.
		void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> &fn);

	private:
		void worker_loop(int id);

		std::vector<std::thread> workers_;
		std::mutex mutex_;
		std::condition_variable start_cv_, done_cv_;
		const std::function<void(std::size_t, std::size_t)> *job_ = nullptr;
		std::size_t job_n_ = 0;
		std::size_t generation_ = 0;
		int pending_ = 0;
		bool stop_ = false;
	};
} // namespace dropstyle
