__extraversion__ = {'dist_name': None, 'dist_package': None, 'editable': False}