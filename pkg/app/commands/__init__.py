from app.commands.compile import register as register_compile
from app.commands.corpus import register as register_corpus
from app.commands.lowerbound import register as register_lowerbound
from app.commands.run import register as register_run
from app.commands.verify import register as register_verify

__all__ = [
    "register_compile",
    "register_corpus",
    "register_lowerbound",
    "register_run",
    "register_verify",
]
