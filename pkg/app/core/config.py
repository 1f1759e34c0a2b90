from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        env_prefix='STEPCRN_',
        extra='ignore',
    )

    app_name: str = 'stepcrn'
    environment: str = 'dev'
    api_prefix: str = '/api/v1'

    log_level: str = 'INFO'
    log_json: bool = True

    state_cap: int = 2_000_000
    exhaustive_volume_cap: int = 14
    input_cap: int = 12
    default_seed_count: int = 25
    step_budget: int = 1_000_000
    max_count: int | None = None
    workers: int = 1


@lru_cache
def get_settings() -> Settings:
    return Settings()
