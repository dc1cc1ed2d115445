class UsageError(ValueError):
    """命令行参数错误 (退出码 1)"""
    pass
