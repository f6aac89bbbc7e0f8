"""Source package initialization."""
