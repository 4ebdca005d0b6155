"""
Standalone runner shared by the test scripts
Run: python scripts/test_<module>.py
"""

import tempfile
import time
import traceback
from pathlib import Path


def run_tests(title: str, namespace: dict) -> int:
    print("=" * 80)
    print(f"🧮  THETA ORBIFOLD - {title}")
    print("=" * 80)
    tests = [(name, fn) for name, fn in namespace.items() if name.startswith("test_") and callable(fn)]
    failed = 0
    for name, fn in tests:
        start = time.time()
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp))
            else:
                fn()
            print(f"✅ {name} ({time.time() - start:.2f}s)")
        except KeyboardInterrupt:
            raise
        except BaseException:
            failed += 1
            print(f"❌ {name}")
            traceback.print_exc()
    print("-" * 80)
    print(f"{len(tests) - failed}/{len(tests)} passed")
    return 1 if failed else 0
