"""Automatic labelling of topic-model topics with corpus article titles.

Titles and topic terms are embedded with jointly trained word and document
models; candidate labels are ranked by combined cosine relevance and then
reranked by a small supervised regressor over letter-trigram, PageRank and
lexical features.
"""

from .corpus import (
    Article,
    TitleLexicon,
    build_title_lexicon,
    collapse_titles,
    collapsed_token,
    filter_articles,
    normalize_title,
    tokenize,
)
from .embeddings import (
    EmbeddingTable,
    TrainConfig,
    cosine,
    export_table,
    import_table,
    train_dbow,
    train_skipgram,
)
from .features import (
    FeatureVector,
    LinkGraph,
    letter_trigram_similarity,
    num_words,
    pagerank,
    title_pagerank,
    topic_overlap,
    trigram_distribution,
    unsupervised_rank,
)
from .generation import (
    CandidateLabel,
    Topic,
    generate_candidates,
    rel_centroid,
    rel_d2v,
    rel_w2v,
    rel_weighted,
)
from .ranker import GoldRating, RankerConfig, RegressionModel, fit, predict, rerank
from .evaluation import (
    RankingDataset,
    ReportRow,
    ablation,
    candidate_quality_stats,
    cross_domain,
    cross_validate,
    ndcg_at_k,
    top1_average,
    upper_bound_report,
)

__version__ = "0.1.0"
