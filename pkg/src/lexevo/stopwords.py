"""Built-in English stoplist.

A conservative, dictionary-free list of articles, pronouns, prepositions,
conjunctions and common auxiliaries. Callers can extend it with their own
files (see :func:`lexevo.textpipe.load_stoplist`) or with an automatic
document-frequency cutoff; removal beyond a standard list rarely changes
downstream results much, so the default stays conservative.
"""

from __future__ import annotations

ENGLISH_STOPWORDS: frozenset[str] = frozenset("""
a about above after again against all also am an and any are aren as at
be because been before being below between both but by
can cannot could couldn
did didn do does doesn doing don down during
each
few for from further
had hadn has hasn have haven having he her here hers herself him himself his
how however
i if in into is isn it its itself
just
let
me more most mustn my myself
no nor not
of off on once only or other ought our ours ourselves out over own
per
same shan she should shouldn since so some such
than that the their theirs them themselves then there these they this those
through thus to too
under until up upon us
very via
was wasn we were weren what when where which while who whom why will with
within without won would wouldn
you your yours yourself yourselves
""".split())
