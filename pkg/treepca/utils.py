import math
import os
import re
import sys
import zlib

import numpy as np

INVALID_FILENAME_CHARS = re.compile('[\\\\/\\:\\*\\?\\"\\<\\>\\|]+')

if sys.platform == 'win32':
    DIRECTORY_EXISTS_EXCEPTION = WindowsError  # noqa: F821
else:
    DIRECTORY_EXISTS_EXCEPTION = OSError


def mkdir(directory):
    try:
        os.makedirs(directory)
    except DIRECTORY_EXISTS_EXCEPTION:
        return


def clean_filename(name):
    return re.sub(INVALID_FILENAME_CHARS, '_', name)


def node_label(node):
    """
    Canonical text of a node, e.g. ``{1,2,3}``
    """
    return '{' + ','.join(str(dim) for dim in node) + '}'


def _label_word(label):
    if isinstance(label, (tuple, list, frozenset, set)):
        label = node_label(sorted(label))

    return zlib.crc32(str(label).encode('utf-8'))


def rng_stream(seed, *labels):
    """
    Independent random generator for the stream ``(seed, labels)``.

    Streams are built on the counter-based Philox generator, so two streams
    with different labels never share state and the order in which they are
    created does not matter.
    """
    entropy = [int(seed) & 0xFFFFFFFF, (int(seed) >> 32) & 0xFFFFFFFF]
    entropy.extend(_label_word(label) for label in labels)

    sequence = np.random.SeedSequence(entropy)
    return np.random.Generator(np.random.Philox(sequence))


def ceil_samples(gamma, count):
    # Guards 1.0000000001 * r from adding a sample
    return max(1, int(math.ceil(gamma * count - 1e-9)))
