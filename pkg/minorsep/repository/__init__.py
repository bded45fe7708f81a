from .service import (
    BaseSearchEngine,
    BucketQueueEngine,
    SearchEngineFactory,
    SplitVertexEngine,
)
