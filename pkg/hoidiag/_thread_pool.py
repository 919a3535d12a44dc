# -*- coding: utf-8 -*-
################################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
################################################################################

"""
Classes which provide a thread pool implementation, e.g., for use in
concurrent categorization of images and matching of HOI classes.
"""

from __future__ import absolute_import
from queue import Queue
from threading import Lock, Thread
import itertools
import logging

logger = logging.getLogger(__name__)

_THREAD_COUNTER = itertools.count(1)


class ThreadPoolWorker(Thread):
    """
    Thread executing tasks from a given tasks queue.
    """

    def __init__(self, tasks, thread_prefix):
        """
        Constructs a ThreadPoolWorker.
        """
        Thread.__init__(self)

        self.tasks = tasks
        self.daemon = True
        self.name = "{}-{}".format(thread_prefix, next(_THREAD_COUNTER))
        self.start()

    def run(self):
        """
        Runs the worker.
        """
        while True:
            func, args, kargs = self.tasks.get()
            try:
                if func is None:
                    # Exit the thread
                    return
                func(*args, **kargs)
            except Exception:  # pylint: disable=broad-except
                logger.exception("Error in worker thread")
            finally:
                del func
                self.tasks.task_done()


class ThreadPool(object):
    """
    Pool of threads consuming tasks from a queue.
    """

    def __init__(self, queue_size, num_threads, thread_prefix):
        """
        Creates a ThreadPool.
        """
        self._tasks = Queue(queue_size)
        self._threads = []
        for _ in range(num_threads):
            t = ThreadPoolWorker(self._tasks, thread_prefix)
            self._threads.append(t)

    @property
    def num_threads(self):
        """
        The number of worker threads in the pool
        """
        return len(self._threads)

    def add_task(self, func, *args, **kargs):
        """Add a task to the queue"""
        self._tasks.put((func, args, kargs))

    def wait_completion(self):
        """Wait for completion of all the tasks in the queue"""
        self._tasks.join()

    def shutdown(self, wait_complete=True):
        """Shuts down the thread pool"""
        logger.debug("Shutting down thread pool...")
        if wait_complete:
            self.wait_completion()

        # Add task to stop the thread
        for _ in self._threads:
            self.add_task(None)

        # Wait for threads to exit
        if wait_complete:
            for t in self._threads:
                t.join()


class WorkerPool(object):
    """
    Runs independent work units (images, HOI classes, thresholds, scenes) and
    returns their results in input order, so the merged output does not
    depend on the number of threads.

    With ``threads <= 1`` every task runs inline on the calling thread.
    """

    _QUEUE_SIZE = 1000

    def __init__(self, threads=1, thread_prefix="hoidiag-worker"):
        """
        Constructor parameters:

        :param int threads: number of worker threads
        :param str thread_prefix: prefix for worker thread names
        """
        self._threads = max(1, int(threads))
        self._thread_prefix = thread_prefix

    @property
    def threads(self):
        """
        The number of worker threads used by :meth:`map_ordered`
        """
        return self._threads

    def map_ordered(self, func, items):
        """
        Apply `func` to every item and return the results in input order.

        :param func: callable taking one item
        :param items: iterable of work units
        :return: list of results, ``results[i] == func(items[i])``
        :raise Exception: the exception raised by the lowest-index failing
            task, re-raised on the calling thread
        """
        items = list(items)
        if self._threads <= 1 or len(items) <= 1:
            return [func(item) for item in items]

        results = [None] * len(items)
        errors = {}
        lock = Lock()

        def _run(index, item):
            try:
                results[index] = func(item)
            except Exception as ex:  # pylint: disable=broad-except
                with lock:
                    errors[index] = ex

        pool = ThreadPool(self._QUEUE_SIZE,
                          min(self._threads, len(items)),
                          self._thread_prefix)
        try:
            for index, item in enumerate(items):
                pool.add_task(_run, index, item)
        finally:
            pool.shutdown()
        if errors:
            raise errors[min(errors)]
        logger.debug("Completed %d tasks on %d threads", len(items),
                     pool.num_threads)
        return results
