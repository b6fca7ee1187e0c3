import itertools
import logging

from queue import Empty, Queue
from threading import Thread

logger = logging.getLogger(__name__)

THREAD_COUNT = 2


class Worker(Thread):
    """
    Drains ``(index, job)`` pairs from a queue and stores each outcome at
    its index
    """

    def __init__(self, queue, results, iterator=None, listener=None,
                 total=None):
        self.queue = queue
        self.results = results
        self.iter = iterator
        self.listener = listener
        self.total = total or self.queue.qsize()

        Thread.__init__(self, daemon=True)
        self.start()

    def increment_counter(self):
        if self.iter is None:
            return

        count = next(self.iter)

        if self.listener is not None:
            self.listener(count, self.total)

    def run(self):
        while True:
            try:
                index, job = self.queue.get_nowait()
            except Empty:
                return

            try:
                self.results[index] = job()
            except Exception as exc:
                self.results[index] = exc

            self.increment_counter()


def run_jobs(jobs, workers=THREAD_COUNT, listener=None):
    """
    Call every job and return the results in job order.

    The first exception in job order is re-raised once all jobs are done.
    ``listener(count, total)`` is called after each finished job.
    """
    jobs = list(jobs)
    results = [None] * len(jobs)
    iterator = itertools.count(1)

    if workers <= 1 or len(jobs) <= 1:
        for index, job in enumerate(jobs):
            try:
                results[index] = job()
            except Exception as exc:
                results[index] = exc

            count = next(iterator)
            if listener is not None:
                listener(count, len(jobs))
    else:
        queue = Queue()
        for item in enumerate(jobs):
            queue.put(item)

        threads = [
            Worker(queue, results, iterator=iterator, listener=listener,
                   total=len(jobs))
            for _ in range(min(workers, len(jobs)))
        ]

        for thread in threads:
            thread.join()

        logger.debug('%d jobs finished on %d threads', len(jobs), len(threads))

    for result in results:
        if isinstance(result, Exception):
            raise result

    return results
