"""Exception types raised across the labelling pipeline."""

import functools


class TopicLabelError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(TopicLabelError):
    """An input file does not follow its documented format."""


class DimensionMismatchError(FormatError):
    """A vector row does not match the dimensionality declared in the header."""


class DuplicateTokenError(FormatError):
    """The same token appears twice in an embedding file."""


class EmptyCorpusError(TopicLabelError):
    """Training was requested on a corpus with no documents."""


class EmptyVocabularyError(TopicLabelError):
    """No token survived the minimum-count cutoff."""


class DegenerateVectorError(TopicLabelError):
    """A cosine was requested against a zero-norm vector."""


class UnknownTitleError(TopicLabelError, LookupError):
    """A title is absent from the embedding table it was looked up in."""


class UnknownLabelError(TopicLabelError, LookupError):
    """A label is absent from the title lexicon."""


class MissingTermsError(TopicLabelError):
    """Every topic term is missing from the word-vector vocabulary."""


class NoTrigramsError(TopicLabelError):
    """No string in the input is long enough to produce a letter trigram."""


class DegenerateTrainingError(TopicLabelError):
    """The regression training set is too small to fit."""


class MissingFeaturesError(TopicLabelError):
    """A candidate is missing its feature vector."""


class MissingGoldError(TopicLabelError):
    """A ranked label has no gold rating."""


class DomainOverlapError(TopicLabelError):
    """Cross-domain evaluation was given overlapping train and test domains."""


def names_file(reader):
    """Make a reader's format errors name the file they came from.

    Wraps any function whose first argument is a path; FormatError messages
    raised inside get the path prepended, keeping their exact subtype.
    """

    @functools.wraps(reader)
    def wrapped(path, *args, **kwargs):
        try:
            return reader(path, *args, **kwargs)
        except FormatError as exc:
            raise type(exc)(f"{path}: {exc}") from exc

    return wrapped
