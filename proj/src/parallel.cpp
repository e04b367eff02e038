#include <dropstyle/parallel.hpp>

#include <algorithm>

namespace dropstyle
{
	WorkerPool::WorkerPool(int threads)
	{
		for (int i = 1; i < std::max(1, threads); ++i)
			workers_.emplace_back([this, i] { worker_loop(i); });
	}

	WorkerPool::~WorkerPool()
	{
		{
			std::lock_guard lock(mutex_);
			stop_ = true;
		}
		start_cv_.notify_all();
		for (auto &w : workers_)
			w.join();
	}

	namespace
	{
		std::pair<std::size_t, std::size_t> chunk(std::size_t n, int parts, int id)
		{
			const std::size_t per = n / parts, extra = n % parts;
			const std::size_t begin = id * per + std::min<std::size_t>(id, extra);
			return {begin, begin + per + (static_cast<std::size_t>(id) < extra ? 1 : 0)};
		}
	} // namespace

	void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)> &fn)
	{
		if (workers_.empty() || n < 2 * workers_.size())
		{
			fn(0, n);
			return;
		}
		{
			std::lock_guard lock(mutex_);
			job_ = &fn;
			job_n_ = n;
			pending_ = static_cast<int>(workers_.size());
			++generation_;
		}
		start_cv_.notify_all();
		const auto [b, e] = chunk(n, size(), 0);
		fn(b, e);
		std::unique_lock lock(mutex_);
		done_cv_.wait(lock, [this] { return pending_ == 0; });
		job_ = nullptr;
	}

	void WorkerPool::worker_loop(int id)
	{
		std::size_t seen = 0;
		while (true)
		{
			const std::function<void(std::size_t, std::size_t)> *job;
			std::size_t n;
			{
				std::unique_lock lock(mutex_);
				start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
				if (stop_)
					return;
				seen = generation_;
				job = job_;
				n = job_n_;
			}
			const auto [b, e] = chunk(n, size(), id);
			(*job)(b, e);
			{
				std::lock_guard lock(mutex_);
				if (--pending_ == 0)
					done_cv_.notify_one();
			}
		}
	}
} // namespace dropstyle
